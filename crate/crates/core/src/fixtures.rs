//! Small reproducible example equations and modules.

use std::sync::Arc;

use rand::Rng;

use crate::equation::Equation;
use crate::equivalence::{self, HModule};
use crate::error::{Error, Result};
use crate::group::HomogeneousSpace;
use crate::linalg::Matrix;
use crate::scalar::Scalar;

/// A random invertible `n x n` matrix with small entries.
pub fn random_invertible<S: Scalar, R: Rng + ?Sized>(n: usize, rng: &mut R, tol: f64) -> Matrix<S> {
    loop {
        let m = Matrix::from_fn(n, n, |_, _| S::sample(rng));
        if m.rank(tol) == n {
            return m;
        }
    }
}

/// `e` in a random pointwise basis: a connection with nonconstant entries
/// isomorphic to `e`.
pub fn random_gauge<S: Scalar, R: Rng + ?Sized>(e: &Equation<S>, rng: &mut R) -> Result<Equation<S>> {
    let tol = e.space().tolerance().rank;
    let p: Vec<Matrix<S>> = (0..e.space().size()).map(|_| random_invertible(e.rank(), rng, tol)).collect();
    e.gauge(&p)
}

/// A random conjugate of `u`.
pub fn random_conjugate<S: Scalar, R: Rng + ?Sized>(u: &HModule<S>, rng: &mut R) -> Result<HModule<S>> {
    let tol = u.space().tolerance().rank;
    let p = random_invertible(u.dim(), rng, tol);
    let pinv = p.inverse(tol).expect("sampled invertible");
    let elements = u.elements().to_vec();
    let conj: Vec<Matrix<S>> = elements.iter().map(|&h| &(&p * u.rho(h).expect("own element")) * &pinv).collect();
    HModule::from_fn(u.space().clone(), u.dim(), |h| {
        let k = elements.iter().position(|&x| x == h).expect("stabilizer element");
        conj[k].clone()
    })
}

/// A random 2-dimensional module: a conjugated sum of two built-in
/// one-dimensional irreducibles.
pub fn random_module2<S: Scalar, R: Rng + ?Sized>(space: &Arc<HomogeneousSpace>, rng: &mut R) -> Result<HModule<S>> {
    let lines: Vec<HModule<S>> = equivalence::builtin_irreps(space)?.into_iter().filter(|(_, v)| v.dim() == 1).map(|(_, v)| v).collect();
    if lines.is_empty() {
        return Err(Error::Unsupported("no built-in one-dimensional modules for this stabilizer".into()));
    }
    let a = &lines[rng.gen_range(0..lines.len())];
    let b = &lines[rng.gen_range(0..lines.len())];
    random_conjugate(&a.direct_sum(b), rng)
}

/// `Γ(S × V)` for a random 2-dimensional `V`.
pub fn random_induced2<S: Scalar, R: Rng + ?Sized>(space: &Arc<HomogeneousSpace>, rng: &mut R) -> Result<Equation<S>> {
    equivalence::induce(&random_module2(space, rng)?)
}

/// `A_4` on four points: the stabilizer `Z_3 = <c>` acts on `F²` by
/// `c -> [[0, 1], [-1, -1]]`, which has determinant one and so preserves
/// the standard area form.
pub fn symplectic_module<S: Scalar>() -> Result<HModule<S>> {
    let space = Arc::new(HomogeneousSpace::alternating4()?);
    let c = space.stabilizer().elements().iter().copied().find(|&h| h != 0).expect("stabilizer has order three");
    let m = Matrix::from_rows(vec![vec![S::zero(), S::one()], vec![-S::one(), -S::one()]]);
    HModule::from_generators(space, 2, vec![(c, m)])
}

pub fn symplectic_equation<S: Scalar>() -> Result<Equation<S>> {
    equivalence::induce(&symplectic_module()?)
}
