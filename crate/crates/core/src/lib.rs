//! G-difference equations on finite homogeneous spaces.
//!
//! A finite set `S` with a transitive permutation group `G` carries the skew
//! group algebra `A = F(S)[G]`. Equations are free `F(S)`-modules with a
//! `G`-action given by connection matrices; solutions are `A`-module maps.
//! Everything is generic over the field through [`Scalar`], with exact
//! rationals, `f64` and `Complex64` provided.

pub mod diffops;
pub mod equation;
pub mod equivalence;
pub mod error;
pub mod fixtures;
pub mod group;
pub mod invariants;
pub mod linalg;
pub mod projection;
pub mod scalar;
pub mod skew;
pub mod solver;

pub use equation::{Connection, Equation, ModuleElement};
pub use error::{Error, Result};
pub use group::{ElementId, FiniteSpace, Group, HomogeneousSpace, Perm, Subgroup, Tolerance, Transversal};
pub use linalg::Matrix;
pub use num_complex::Complex64;
pub use scalar::{Rational, Scalar};
pub use skew::{Function, SkewOp};

pub type RationalEquation = Equation<Rational>;
pub type ComplexEquation = Equation<Complex64>;
pub type RealEquation = Equation<f64>;
pub type RationalMatrix = Matrix<Rational>;
pub type ComplexMatrix = Matrix<Complex64>;
