//! Difference operators between equations.
//!
//! A raw operator is an element `θ = Σ θ_ijg φ_ij ⊗ g` of `Hom_k(E, E') ⊗_k A`.
//! It acts on `E` through `μ(φ ⊗ a)(e) = φ(a e)`; in coordinates the `j`-th
//! output at `y` is `Σ_{i,k,g} θ_ijg(y) f_k(g⁻¹y) E^g_ki(y)`. Operators are
//! compared through this action, so the action matrix is the canonical form.
//!
//! Action matrices use the column convention: input index `k * |S| + z`,
//! output index `j * |S| + y`, `out = M · in`.

use std::sync::Arc;

use crate::equation::{Equation, ModuleElement};
use crate::equivalence;
use crate::error::{Error, Result};
use crate::group::{ElementId, HomogeneousSpace};
use crate::linalg::Matrix;
use crate::scalar::Scalar;
use crate::skew::{Function, SkewOp};
use crate::solver::{self, Morphism};

/// An element of `Hom_k(E, E') ⊗_k A` in coordinates.
#[derive(Clone, Debug)]
pub struct RawOperator<S> {
    source: Equation<S>,
    target: Equation<S>,
    /// `θ_ijg` at index `(i * m + j) * |G| + g`.
    coeffs: Vec<Function<S>>,
}

impl<S: Scalar> RawOperator<S> {
    pub fn zero(source: &Equation<S>, target: &Equation<S>) -> Result<Self> {
        source.require_same_space(target)?;
        let space = source.space();
        let len = source.rank() * target.rank() * space.group().order();
        Ok(Self { source: source.clone(), target: target.clone(), coeffs: vec![Function::zero(space.size()); len] })
    }

    /// Sum of `θ φ_ij ⊗ g` terms; repeated indices add.
    pub fn from_terms(
        source: &Equation<S>,
        target: &Equation<S>,
        terms: impl IntoIterator<Item = (usize, usize, ElementId, Function<S>)>,
    ) -> Result<Self> {
        let mut op = Self::zero(source, target)?;
        for (i, j, g, f) in terms {
            op.add_term(i, j, g, &f)?;
        }
        Ok(op)
    }

    /// `id ⊗ a` on `𝟙 -> 𝟙`.
    pub fn from_skew(one: &Equation<S>, a: &SkewOp<S>) -> Result<Self> {
        if one.rank() != 1 || !Arc::ptr_eq(one.space(), a.space()) {
            return Err(Error::ShapeMismatch("id ⊗ a needs a rank-one equation on the operator's space".into()));
        }
        Self::from_terms(one, one, a.terms().iter().map(|(&g, f)| (0, 0, g, f.clone())))
    }

    fn index(&self, i: usize, j: usize, g: ElementId) -> usize {
        (i * self.target.rank() + j) * self.source.space().group().order() + g
    }

    fn add_term(&mut self, i: usize, j: usize, g: ElementId, f: &Function<S>) -> Result<()> {
        if i >= self.source.rank() || j >= self.target.rank() || g >= self.source.space().group().order() {
            return Err(Error::ShapeMismatch(format!("operator term ({i}, {j}, {g}) out of range")));
        }
        if f.len() != self.source.space().size() {
            return Err(Error::ShapeMismatch("coefficient length must equal the number of points".into()));
        }
        let idx = self.index(i, j, g);
        self.coeffs[idx] = &self.coeffs[idx] + f;
        Ok(())
    }

    pub fn source(&self) -> &Equation<S> {
        &self.source
    }

    pub fn target(&self) -> &Equation<S> {
        &self.target
    }

    pub fn coefficient(&self, i: usize, j: usize, g: ElementId) -> &Function<S> {
        &self.coeffs[self.index(i, j, g)]
    }

    /// The `k`-linear part attached to `g`, as per-point `n x m` matrices.
    pub fn hom_part(&self, g: ElementId) -> Vec<Matrix<S>> {
        let (n, m) = (self.source.rank(), self.target.rank());
        (0..self.source.space().size())
            .map(|y| Matrix::from_fn(n, m, |i, j| self.coefficient(i, j, g).at(y).clone()))
            .collect()
    }

    /// Add `Σ_y P(y) ⊗ g` where `P(y)` is `n x m`.
    fn add_hom_part(&mut self, g: ElementId, part: &[Matrix<S>]) {
        let (n, m) = (self.source.rank(), self.target.rank());
        for i in 0..n {
            for j in 0..m {
                let f = Function::new(part.iter().map(|p| p[(i, j)].clone()).collect());
                let idx = self.index(i, j, g);
                self.coeffs[idx] = &self.coeffs[idx] + &f;
            }
        }
    }

    /// `θ` flattened at index `((i * m + j) * |G| + g) * |S| + y`.
    pub fn to_vector(&self) -> Vec<S> {
        self.coeffs.iter().flat_map(|f| f.values().iter().cloned()).collect()
    }

    pub fn from_vector(source: &Equation<S>, target: &Equation<S>, v: &[S]) -> Result<Self> {
        let mut op = Self::zero(source, target)?;
        let p = source.space().size();
        if v.len() != op.coeffs.len() * p {
            return Err(Error::ShapeMismatch("operator coordinate vector has the wrong length".into()));
        }
        for (c, chunk) in op.coeffs.iter_mut().zip(v.chunks(p.max(1))) {
            *c = Function::new(chunk.to_vec());
        }
        Ok(op)
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.source != other.source || self.target != other.target {
            return Err(Error::ShapeMismatch("operators must share source and target".into()));
        }
        let coeffs = self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a + b).collect();
        Ok(Self { source: self.source.clone(), target: self.target.clone(), coeffs })
    }

    pub fn scale(&self, k: &S) -> Self {
        Self { source: self.source.clone(), target: self.target.clone(), coeffs: self.coeffs.iter().map(|f| f.scale(k)).collect() }
    }

    /// The diagonal action `g(φ ⊗ b) = gφ ⊗ gb` extended to `a = Σ a_g g`.
    pub fn left_mul(&self, a: &SkewOp<S>) -> Result<Self> {
        if !Arc::ptr_eq(self.source.space(), a.space()) {
            return Err(Error::SpaceMismatch);
        }
        let group = self.source.space().group();
        let mut out = Self::zero(&self.source, &self.target)?;
        for (&g, ag) in a.terms() {
            for h in group.elements() {
                let conj = conjugate_hom(&self.source, &self.target, g, &self.hom_part(h));
                let scaled: Vec<Matrix<S>> = conj.iter().enumerate().map(|(y, m)| m.scale(ag.at(y))).collect();
                out.add_hom_part(group.mul(g, h), &scaled);
            }
        }
        Ok(out)
    }
}

/// `(gψ)(y) = E^g(y)⁻¹ ψ(g⁻¹y) E'^g(y)` for a `k`-linear `ψ: E -> E'`.
fn conjugate_hom<S: Scalar>(source: &Equation<S>, target: &Equation<S>, g: ElementId, psi: &[Matrix<S>]) -> Vec<Matrix<S>> {
    let space = source.space();
    let tol = space.tolerance();
    let group = space.group();
    (0..space.size())
        .map(|y| {
            let einv = source.at(g, y).inverse(tol.rank).expect("connection matrices are invertible");
            &(&einv * &psi[group.act_inv(g, y)]) * target.at(g, y)
        })
        .collect()
}

/// The action matrix of `μ(θ)`.
pub fn mu<S: Scalar>(theta: &RawOperator<S>) -> Matrix<S> {
    let (e, f) = (&theta.source, &theta.target);
    let space = e.space();
    let group = space.group();
    let (n, m, p) = (e.rank(), f.rank(), space.size());
    let mut out = Matrix::<S>::zeros(m * p, n * p);
    for g in group.elements() {
        for y in 0..p {
            let src = group.act_inv(g, y);
            let eg = e.at(g, y);
            for i in 0..n {
                for j in 0..m {
                    let c = theta.coefficient(i, j, g).at(y);
                    if c.is_zero() {
                        continue;
                    }
                    for k in 0..n {
                        let r = (j * p + y, k * p + src);
                        out[r] = out[r].clone() + c.clone() * eg[(k, i)].clone();
                    }
                }
            }
        }
    }
    out
}

/// The linear map `θ -> μ(θ)` as a matrix from operator coordinates to
/// flattened action matrices (row-major).
pub fn mu_matrix<S: Scalar>(source: &Equation<S>, target: &Equation<S>) -> Result<Matrix<S>> {
    source.require_same_space(target)?;
    let space = source.space();
    let group = space.group();
    let (n, m, p, order) = (source.rank(), target.rank(), space.size(), group.order());
    let cols = n * m * order * p;
    let width = n * p;
    let mut out = Matrix::<S>::zeros(m * p * width, cols);
    for i in 0..n {
        for j in 0..m {
            for g in 0..order {
                for y in 0..p {
                    let col = ((i * m + j) * order + g) * p + y;
                    let src = group.act_inv(g, y);
                    for k in 0..n {
                        let row = (j * p + y) * width + k * p + src;
                        out[(row, col)] = out[(row, col)].clone() + source.at(g, y)[(k, i)].clone();
                    }
                }
            }
        }
    }
    Ok(out)
}

/// A basis of `ker μ`.
pub fn ker_mu_basis<S: Scalar>(source: &Equation<S>, target: &Equation<S>) -> Result<Vec<RawOperator<S>>> {
    let tol = source.space().tolerance();
    let null = mu_matrix(source, target)?.nullspace(tol.rank);
    (0..null.cols())
        .map(|c| {
            let v: Vec<S> = (0..null.rows()).map(|r| null[(r, c)].clone()).collect();
            RawOperator::from_vector(source, target, &v)
        })
        .collect()
}

/// An element of `Difn_*(E, E')`: the action matrix plus one representative.
#[derive(Clone, Debug)]
pub struct DiffOperator<S> {
    matrix: Matrix<S>,
    representative: RawOperator<S>,
}

impl<S: Scalar> PartialEq for DiffOperator<S> {
    fn eq(&self, other: &Self) -> bool {
        let eps = self.source().space().tolerance().eps;
        self.source() == other.source() && self.target() == other.target() && self.matrix.approx_eq(&other.matrix, eps)
    }
}

pub fn canonicalize<S: Scalar>(theta: RawOperator<S>) -> DiffOperator<S> {
    DiffOperator { matrix: mu(&theta), representative: theta }
}

impl<S: Scalar> DiffOperator<S> {
    pub fn source(&self) -> &Equation<S> {
        &self.representative.source
    }

    pub fn target(&self) -> &Equation<S> {
        &self.representative.target
    }

    pub fn matrix(&self) -> &Matrix<S> {
        &self.matrix
    }

    pub fn representative(&self) -> &RawOperator<S> {
        &self.representative
    }

    pub fn identity(e: &Equation<S>) -> Result<Self> {
        let one = Function::one(e.space().size());
        let terms = (0..e.rank()).map(|i| (i, i, 0, one.clone()));
        Ok(canonicalize(RawOperator::from_terms(e, e, terms)?))
    }

    pub fn zero(source: &Equation<S>, target: &Equation<S>) -> Result<Self> {
        Ok(canonicalize(RawOperator::zero(source, target)?))
    }

    pub fn apply(&self, v: &ModuleElement<S>) -> ModuleElement<S> {
        let p = self.source().space().size();
        let input = v.to_vector();
        let col = Matrix::new(input.len(), 1, input);
        let out = &self.matrix * &col;
        ModuleElement::from_vector(self.target().rank(), p, out.entries())
    }

    /// `a · Δ`.
    pub fn left_mul(&self, a: &SkewOp<S>) -> Result<Self> {
        Ok(canonicalize(self.representative.left_mul(a)?))
    }
}

/// `Δ_a = [id ⊗ a] ∈ Difn_*(k, k)`.
pub fn delta_a<S: Scalar>(one: &Equation<S>, a: &SkewOp<S>) -> Result<DiffOperator<S>> {
    Ok(canonicalize(RawOperator::from_skew(one, a)?))
}

/// `F(φ ⊗ a)(ψ ⊗ b) = Σ_g a_g φ ∘ (gψ) ⊗ gb` on representatives.
pub fn compose_raw<S: Scalar>(second: &RawOperator<S>, first: &RawOperator<S>) -> Result<RawOperator<S>> {
    if first.target != second.source {
        return Err(Error::ShapeMismatch("operators are not composable".into()));
    }
    let group = first.source.space().group();
    let mut out = RawOperator::zero(&first.source, &second.target)?;
    for g in group.elements() {
        let phi = second.hom_part(g);
        if phi.iter().all(|m| m.is_zero_within(0.0)) {
            continue;
        }
        for h in group.elements() {
            let psi = first.hom_part(h);
            if psi.iter().all(|m| m.is_zero_within(0.0)) {
                continue;
            }
            let moved = conjugate_hom(&first.source, &first.target, g, &psi);
            let part: Vec<Matrix<S>> = moved.iter().zip(&phi).map(|(a, b)| a * b).collect();
            out.add_hom_part(group.mul(g, h), &part);
        }
    }
    Ok(out)
}

/// `Δ₂ ∘ Δ₁`, computed on representatives and checked against the product
/// of action matrices.
pub fn compose<S: Scalar>(second: &DiffOperator<S>, first: &DiffOperator<S>) -> Result<DiffOperator<S>> {
    let raw = compose_raw(&second.representative, &first.representative)?;
    let composed = canonicalize(raw);
    let product = &second.matrix * &first.matrix;
    if !composed.matrix.approx_eq(&product, second.source().space().tolerance().eps) {
        return Err(Error::InconsistentConnection("composed operator disagrees with the product of its factors".into()));
    }
    Ok(composed)
}

/// `Difn_*(E, k)` as an equation. `A` acts by left composition, so every
/// functional `λ_kz: e -> f_k(z)` is invariant and the connection is trivial.
/// Basis index `k * |S| + z`.
pub fn difn_to_functions<S: Scalar>(e: &Equation<S>) -> Result<Equation<S>> {
    Ok(Equation::trivial_power(e.space().clone(), e.rank() * e.space().size()))
}

/// The equation `E_Δ = Coker φ^Δ` of an operator together with its
/// ingredients.
#[derive(Clone, Debug)]
pub struct OperatorEquation<S> {
    /// `Difn_*(E₂, k)`.
    pub difn_target: Equation<S>,
    /// `Difn_*(E₁, k)`.
    pub difn_source: Equation<S>,
    /// `φ^Δ(∇) = ∇ ∘ Δ`.
    pub precompose: Morphism<S>,
    pub equation: Equation<S>,
    /// `Difn_*(E₁, k) -> E_Δ`.
    pub projection: Morphism<S>,
}

pub fn equation_of<S: Scalar>(delta: &DiffOperator<S>) -> Result<OperatorEquation<S>> {
    let difn_target = difn_to_functions(delta.target())?;
    let difn_source = difn_to_functions(delta.source())?;
    // ∇ = Σ c_jw λ_jw maps to Σ_jw c_jw M[(j,w),(k,z)] λ_kz.
    let matrices = vec![delta.matrix.clone(); delta.source().space().size()];
    let precompose = Morphism::new(difn_target.clone(), difn_source.clone(), matrices)?;
    let tol = delta.source().space().tolerance();
    let image = precompose.at(delta.source().space().base_point()).row_space(tol.rank);
    let (equation, projection) = equivalence::quotient(&difn_source, &image)?;
    Ok(OperatorEquation { difn_target, difn_source, precompose, equation, projection })
}

/// A basis of `C(Δ) = {e : Δ(e) = 0}`.
pub fn classical_solutions<S: Scalar>(delta: &DiffOperator<S>) -> Vec<ModuleElement<S>> {
    let tol = delta.source().space().tolerance();
    let null = delta.matrix.nullspace(tol.rank);
    let (n, p) = (delta.source().rank(), delta.source().space().size());
    (0..null.cols())
        .map(|c| {
            let v: Vec<S> = (0..null.rows()).map(|r| null[(r, c)].clone()).collect();
            ModuleElement::from_vector(n, p, &v)
        })
        .collect()
}

/// Summary of the embedding `C(Δ) -> Hom_A(E_Δ, 𝟙)`, `e -> φ_e`.
#[derive(Clone, Debug)]
pub struct EmbedReport<S> {
    pub classical_dim: usize,
    pub hom_dim: usize,
    pub injective: bool,
    pub maps: Vec<Morphism<S>>,
}

impl<S> EmbedReport<S> {
    pub fn passed(&self) -> bool {
        self.injective && self.classical_dim <= self.hom_dim
    }
}

/// `φ_e([λ]) = λ(e)` for each classical solution, verified as a morphism.
pub fn embed_solutions<S: Scalar>(delta: &DiffOperator<S>) -> Result<EmbedReport<S>> {
    let space = delta.source().space().clone();
    let tol = space.tolerance();
    let eq = equation_of(delta)?;
    let one = Equation::trivial(space.clone());
    let q = eq.equation.rank();
    let mut maps = Vec::new();
    for sol in classical_solutions(delta) {
        let v = sol.to_vector();
        let column = Matrix::new(v.len(), 1, v.clone());
        let row = Matrix::new(1, v.len(), v);
        let matrices = (0..space.size())
            .map(|y| {
                if q == 0 {
                    return Err(Error::NotASolution("solution does not descend to a zero equation".into()));
                }
                let pt = eq.projection.at(y).transpose();
                Matrix::solve_left(&pt, &row, tol.rank)
                    .map(|x| x.transpose())
                    .ok_or_else(|| Error::NotASolution("λ(e) does not vanish on the image of φ^Δ".into()))
            })
            .collect::<Result<Vec<_>>>()?;
        let phi = Morphism::new(eq.equation.clone(), one.clone(), matrices)?;
        // φ_e ∘ π must be λ -> λ(e).
        let lifted = eq.projection.then(&phi)?;
        if !lifted.matrices().iter().all(|m| m.approx_eq(&column, tol.eps)) {
            return Err(Error::NotASolution("φ_e does not evaluate at e".into()));
        }
        maps.push(phi);
    }
    let injective = if maps.is_empty() {
        true
    } else {
        let rows: Vec<Vec<S>> = maps.iter().map(Morphism::to_vector).collect();
        Matrix::from_rows(rows).rank(tol.rank) == maps.len()
    };
    let hom_dim = solver::hom_space(&eq.equation, &one)?.dim();
    Ok(EmbedReport { classical_dim: maps.len(), hom_dim, injective, maps })
}

/// `Σ_k (Σ_g c^j_kg g) f_k = 0` for `j = 1..m`.
#[derive(Clone, Debug)]
pub struct ClassicalSystem<S> {
    space: Arc<HomogeneousSpace>,
    unknowns: usize,
    /// Per equation: `(k, g, c^j_kg)`.
    equations: Vec<Vec<(usize, ElementId, Function<S>)>>,
}

impl<S: Scalar> ClassicalSystem<S> {
    pub fn new(space: Arc<HomogeneousSpace>, unknowns: usize, equations: Vec<Vec<(usize, ElementId, Function<S>)>>) -> Result<Self> {
        for (j, eq) in equations.iter().enumerate() {
            for (k, g, f) in eq {
                if *k >= unknowns || *g >= space.group().order() || f.len() != space.size() {
                    return Err(Error::ShapeMismatch(format!("term of equation {j} is out of range")));
                }
            }
        }
        Ok(Self { space, unknowns, equations })
    }

    pub fn space(&self) -> &Arc<HomogeneousSpace> {
        &self.space
    }

    pub fn unknowns(&self) -> usize {
        self.unknowns
    }

    pub fn equations(&self) -> &[Vec<(usize, ElementId, Function<S>)>] {
        &self.equations
    }
}

/// The operator `𝟙ⁿ -> 𝟙ᵐ` with `θ_kjg = c^j_kg`; with the trivial
/// connection on the source this reproduces the system row for row.
pub fn ingest_classical<S: Scalar>(sys: &ClassicalSystem<S>) -> Result<DiffOperator<S>> {
    let e1 = Equation::trivial_power(sys.space.clone(), sys.unknowns);
    let e2 = Equation::trivial_power(sys.space.clone(), sys.equations.len());
    let terms = sys
        .equations
        .iter()
        .enumerate()
        .flat_map(|(j, eq)| eq.iter().map(move |(k, g, f)| (*k, j, *g, f.clone())));
    Ok(canonicalize(RawOperator::from_terms(&e1, &e2, terms)?))
}
