//! Characters of fibers and projections onto isotypic components.

use std::sync::Arc;

use crate::equation::Equation;
use crate::equivalence::{self, HModule};
use crate::error::{Error, Result};
use crate::group::{ElementId, HomogeneousSpace};
use crate::linalg::Matrix;
use crate::scalar::Scalar;
use crate::solver::{self, Morphism};

/// A class function on the base-point stabilizer, transported to the
/// other stabilizers by the transversal.
#[derive(Clone, Debug)]
pub struct Character<S> {
    space: Arc<HomogeneousSpace>,
    /// In stabilizer order.
    values: Vec<S>,
}

impl<S: Scalar> PartialEq for Character<S> {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.space, &other.space) && self.values == other.values
    }
}

impl<S: Scalar> Character<S> {
    pub fn new(space: Arc<HomogeneousSpace>, values: Vec<S>) -> Result<Self> {
        if values.len() != space.stabilizer().order() {
            return Err(Error::ShapeMismatch("one character value per stabilizer element is required".into()));
        }
        Ok(Self { space, values })
    }

    pub fn of_module(v: &HModule<S>) -> Self {
        Self { space: v.space().clone(), values: v.character_values() }
    }

    pub fn values(&self) -> &[S] {
        &self.values
    }

    /// `χ(h)` for `h` in the base-point stabilizer.
    pub fn at(&self, h: ElementId) -> Result<&S> {
        self.space.stabilizer().position(h).map(|p| &self.values[p]).ok_or(Error::ElementNotInH(h))
    }

    /// `χ(e)`.
    pub fn degree(&self) -> &S {
        self.at(0).expect("identity is in H")
    }

    /// `χ_y(k) = χ(σ(y)⁻¹ k σ(y))` for `k` fixing `y`.
    pub fn transported(&self, y: usize, k: ElementId) -> Result<&S> {
        let group = self.space.group();
        let s = self.space.transversal().get(y);
        self.at(group.mul(group.mul(group.inv(s), k), s))
    }

    pub fn add(&self, other: &Self) -> Self {
        let values = self.values.iter().zip(&other.values).map(|(a, b)| a.clone() + b.clone()).collect();
        Self { space: self.space.clone(), values }
    }

    /// `⟨χ, ψ⟩ = |H|⁻¹ Σ χ(h) ψ(h⁻¹)`.
    pub fn inner(&self, other: &Self) -> S {
        let group = self.space.group();
        let stab = self.space.stabilizer();
        let sum = stab.elements().iter().enumerate().fold(S::zero(), |acc, (i, &h)| {
            acc + self.values[i].clone() * other.at(group.inv(h)).expect("H is closed").clone()
        });
        sum / S::from_i64(stab.order() as i64)
    }
}

/// `χ(h) = tr E^h(x₀)`.
pub fn character<S: Scalar>(e: &Equation<S>) -> Character<S> {
    Character::of_module(&equivalence::fiber(e))
}

/// The Frobenius operator `Π(y) = (χ(e)/|H_y|) Σ_{k ∈ H_y} χ_y(k⁻¹) E^k(y)`,
/// computed literally at every point over the conjugated stabilizer
/// `H_y = σ(y) H σ(y)⁻¹`.
pub fn frobenius_projection<S: Scalar>(e: &Equation<S>, target: &Character<S>) -> Result<Morphism<S>> {
    e.require_same_space_as(&target.space)?;
    let space = e.space();
    let group = space.group();
    let stab = space.stabilizer();
    let n = e.rank();
    let scale = target.degree().clone() / S::from_i64(stab.order() as i64);
    let mut matrices = Vec::with_capacity(space.size());
    for y in 0..space.size() {
        let s = space.transversal().get(y);
        let mut acc = Matrix::zeros(n, n);
        for &h in stab.elements() {
            let k = group.mul(group.mul(s, h), group.inv(s));
            debug_assert_eq!(group.act(k, y), y);
            let weight = target.transported(y, group.inv(k))?.clone();
            acc = acc + e.at(k, y).scale(&weight);
        }
        matrices.push(acc.scale(&scale));
    }
    Morphism::new(e.clone(), e.clone(), matrices)
}

/// The same operator built once on the fiber and moved to each point by
/// the frame `T(y) = E^{σ(y)}(y)`: `Π(y) = T(y)⁻¹ P T(y)`.
pub fn frobenius_projection_via_fiber<S: Scalar>(e: &Equation<S>, target: &Character<S>) -> Result<Morphism<S>> {
    e.require_same_space_as(&target.space)?;
    let space = e.space();
    let group = space.group();
    let stab = space.stabilizer();
    let tol = space.tolerance();
    let v = equivalence::fiber(e);
    let scale = target.degree().clone() / S::from_i64(stab.order() as i64);
    let mut p = Matrix::zeros(e.rank(), e.rank());
    for &h in stab.elements() {
        p = p + v.rho(h)?.scale(target.at(group.inv(h))?);
    }
    let p = p.scale(&scale);
    let matrices = equivalence::trivialization(e)
        .iter()
        .map(|t| &(&t.inverse(tol.rank).expect("connection matrices are invertible") * &p) * t)
        .collect();
    Morphism::new(e.clone(), e.clone(), matrices)
}

/// Frobenius projection for one of the built-in irreducibles, by name.
pub fn builtin_character<S: Scalar>(space: &Arc<HomogeneousSpace>, name: &str) -> Result<Character<S>> {
    equivalence::builtin_irreps::<S>(space)?
        .into_iter()
        .find(|(n, _)| n == name)
        .map(|(_, m)| Character::of_module(&m))
        .ok_or_else(|| Error::Unsupported(format!("no built-in irreducible named {name:?}")))
}

/// `max_y ‖Π(y)² - Π(y)‖`.
pub fn idempotence_defect<S: Scalar>(p: &Morphism<S>) -> f64 {
    p.matrices().iter().map(|m| if m.rows() == 0 { 0.0 } else { (m * m).max_abs_diff(m) }).fold(0.0, f64::max)
}

/// Outcome of the Schur relations check for a family of simple equations
/// inside a host equation.
#[derive(Clone, Debug)]
pub struct SchurReport {
    /// `[i][j]`: defect of `Π_i` on the `j`-th simple against `δ_ij · id`.
    pub restriction_defects: Vec<Vec<f64>>,
    pub idempotence_defects: Vec<f64>,
    /// Largest `‖Π_i Π_j‖` over `i ≠ j`.
    pub orthogonality_defect: f64,
    /// `‖Σ Π_i - id‖` on the host.
    pub completeness_defect: f64,
    /// Fiber rank of each `Π_i` on the host.
    pub fiber_ranks: Vec<usize>,
    pub tolerance: f64,
}

impl SchurReport {
    pub fn passed(&self) -> bool {
        let ok = |x: &f64| *x <= self.tolerance;
        self.restriction_defects.iter().flatten().all(ok)
            && self.idempotence_defects.iter().all(ok)
            && ok(&self.orthogonality_defect)
    }

    pub fn complete(&self) -> bool {
        self.completeness_defect <= self.tolerance
    }
}

fn pointwise_defect<S: Scalar>(a: &[Matrix<S>], b: &[Matrix<S>]) -> f64 {
    a.iter().zip(b).map(|(x, y)| if x.rows() * x.cols() == 0 { 0.0 } else { x.max_abs_diff(y) }).fold(0.0, f64::max)
}

/// Projections for the characters of `simples`, checked on the simples
/// themselves and on `host`.
pub fn schur_check<S: Scalar>(host: &Equation<S>, simples: &[Equation<S>]) -> Result<SchurReport> {
    let characters: Vec<Character<S>> = simples.iter().map(character).collect();
    let mut restriction_defects = Vec::new();
    for chi in &characters {
        let mut row = Vec::new();
        for (j, s) in simples.iter().enumerate() {
            let p = frobenius_projection(s, chi)?;
            let expect = if characters[j] == *chi { Morphism::identity(s) } else { Morphism::zero(s, s)? };
            row.push(pointwise_defect(p.matrices(), expect.matrices()));
        }
        restriction_defects.push(row);
    }
    let projections = characters.iter().map(|chi| frobenius_projection(host, chi)).collect::<Result<Vec<_>>>()?;
    let idempotence_defects = projections.iter().map(idempotence_defect).collect();
    let mut orthogonality_defect = 0.0f64;
    for (i, a) in projections.iter().enumerate() {
        for (j, b) in projections.iter().enumerate() {
            if i != j {
                let prod = a.then(b)?;
                orthogonality_defect =
                    orthogonality_defect.max(pointwise_defect(prod.matrices(), Morphism::zero(host, host)?.matrices()));
            }
        }
    }
    let mut total = Morphism::zero(host, host)?;
    for p in &projections {
        total = total.add(p)?;
    }
    let completeness_defect = pointwise_defect(total.matrices(), Morphism::identity(host).matrices());
    let fiber_ranks = projections.iter().map(Morphism::fiber_rank).collect();
    let tolerance = if S::EXACT { 0.0 } else { host.space().tolerance().eps };
    Ok(SchurReport { restriction_defects, idempotence_defects, orthogonality_defect, completeness_defect, fiber_ranks, tolerance })
}

/// The isotypic part `Π_S E` with its embedding `ι` and the corestriction
/// `c: E -> Π_S E` satisfying `Π_S = ι ∘ c`.
pub struct IsotypicPart<S> {
    pub equation: Equation<S>,
    pub embedding: Morphism<S>,
    pub corestriction: Morphism<S>,
}

pub fn isotypic_part<S: Scalar>(e: &Equation<S>, simple: &Equation<S>) -> Result<IsotypicPart<S>> {
    let pi = frobenius_projection(e, &character(simple))?;
    let (part, embedding) = solver::image(&pi)?;
    let tol = e.space().tolerance();
    let matrices = (0..e.space().size())
        .map(|y| {
            if part.rank() == 0 {
                return Ok(Matrix::zeros(e.rank(), 0));
            }
            Matrix::solve_left(embedding.at(y), pi.at(y), tol.rank)
                .ok_or_else(|| Error::NotASolution("projection does not factor through its image".into()))
        })
        .collect::<Result<Vec<_>>>()?;
    let corestriction = Morphism::new(e.clone(), part.clone(), matrices)?;
    Ok(IsotypicPart { equation: part, embedding, corestriction })
}

/// `Π_S^*(ψ) = ψ ∘ Π_S`: a solution of `E` of type `S` from a solution of
/// the isotypic part.
pub fn factor_solution<S: Scalar>(part: &IsotypicPart<S>, psi: &Morphism<S>) -> Result<Morphism<S>> {
    if psi.source() != &part.equation {
        return Err(Error::ShapeMismatch("ψ must be defined on the isotypic part".into()));
    }
    let phi = part.corestriction.then(psi)?;
    phi.verify()?;
    Ok(phi)
}

/// `(dim Hom_A(E, S), dim Hom_A(Π_S E, S))`, equal by the factoring theorem.
pub fn factoring_dimensions<S: Scalar>(e: &Equation<S>, simple: &Equation<S>) -> Result<(usize, usize)> {
    let part = isotypic_part(e, simple)?;
    let direct = solver::hom_space(e, simple)?.dim();
    let via = solver::hom_space(&part.equation, simple)?;
    for psi in via.morphisms() {
        factor_solution(&part, psi)?;
    }
    Ok((direct, via.dim()))
}
