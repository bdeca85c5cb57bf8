//! Solutions and symmetries: `Hom_A(E, F)`, kernels, images, isomorphism
//! and simplicity tests, and splitting into indecomposable summands.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::equation::Equation;
use crate::equivalence::{self, HModule};
use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::scalar::Scalar;

/// An `A`-module map `E -> F`: per-point `n x m` matrices `φ(y)` with
/// `φ(e_i) = Σ_j φ_ij f_j`, subject to `φ(g⁻¹y) F^g(y) = E^g(y) φ(y)`.
#[derive(Clone, Debug)]
pub struct Morphism<S> {
    source: Equation<S>,
    target: Equation<S>,
    matrices: Vec<Matrix<S>>,
}

impl<S: Scalar> PartialEq for Morphism<S> {
    fn eq(&self, other: &Self) -> bool {
        self.source == other.source && self.target == other.target && self.matrices == other.matrices
    }
}

impl<S: Scalar> Morphism<S> {
    /// Build and verify against every group element.
    pub fn new(source: Equation<S>, target: Equation<S>, matrices: Vec<Matrix<S>>) -> Result<Self> {
        let m = Self::new_unchecked(source, target, matrices)?;
        m.verify()?;
        Ok(m)
    }

    /// Shape checks only.
    pub fn new_unchecked(source: Equation<S>, target: Equation<S>, matrices: Vec<Matrix<S>>) -> Result<Self> {
        source.require_same_space(&target)?;
        if matrices.len() != source.space().size() {
            return Err(Error::ShapeMismatch("morphism needs one matrix per point".into()));
        }
        if matrices.iter().any(|m| m.rows() != source.rank() || m.cols() != target.rank()) {
            return Err(Error::ShapeMismatch(format!(
                "morphism matrices must be {}x{}",
                source.rank(),
                target.rank()
            )));
        }
        Ok(Self { source, target, matrices })
    }

    pub fn identity(e: &Equation<S>) -> Self {
        let matrices = vec![Matrix::identity(e.rank()); e.space().size()];
        Self { source: e.clone(), target: e.clone(), matrices }
    }

    pub fn zero(source: &Equation<S>, target: &Equation<S>) -> Result<Self> {
        let matrices = vec![Matrix::zeros(source.rank(), target.rank()); source.space().size()];
        Self::new_unchecked(source.clone(), target.clone(), matrices)
    }

    pub fn source(&self) -> &Equation<S> {
        &self.source
    }

    pub fn target(&self) -> &Equation<S> {
        &self.target
    }

    pub fn at(&self, y: usize) -> &Matrix<S> {
        &self.matrices[y]
    }

    pub fn matrices(&self) -> &[Matrix<S>] {
        &self.matrices
    }

    /// Largest entrywise defect of the intertwining equation over all of `G`.
    pub fn residual(&self) -> f64 {
        let space = self.source.space();
        let group = space.group();
        let mut worst = 0.0f64;
        for g in group.elements() {
            for y in 0..space.size() {
                let lhs = &self.matrices[group.act_inv(g, y)] * self.target.at(g, y);
                let rhs = self.source.at(g, y) * &self.matrices[y];
                if lhs.rows() * lhs.cols() > 0 {
                    worst = worst.max(lhs.max_abs_diff(&rhs));
                }
            }
        }
        worst
    }

    pub fn verify(&self) -> Result<()> {
        let space = self.source.space();
        let group = space.group();
        let eps = space.tolerance().eps;
        for g in group.elements() {
            for y in 0..space.size() {
                let lhs = &self.matrices[group.act_inv(g, y)] * self.target.at(g, y);
                let rhs = self.source.at(g, y) * &self.matrices[y];
                if !lhs.approx_eq(&rhs, eps) {
                    return Err(Error::NotASolution(format!("intertwining fails for element {g} at point {y}")));
                }
            }
        }
        Ok(())
    }

    pub fn is_valid(&self) -> bool {
        self.verify().is_ok()
    }

    /// `next ∘ self`; the matrix of the composite is `φ(y) ψ(y)`.
    pub fn then(&self, next: &Morphism<S>) -> Result<Morphism<S>> {
        if self.target != next.source {
            return Err(Error::ShapeMismatch("composable morphisms must share the middle equation".into()));
        }
        let matrices = self.matrices.iter().zip(&next.matrices).map(|(a, b)| a * b).collect();
        Self::new_unchecked(self.source.clone(), next.target.clone(), matrices)
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.source != other.source || self.target != other.target {
            return Err(Error::ShapeMismatch("morphisms must share source and target".into()));
        }
        let matrices = self.matrices.iter().zip(&other.matrices).map(|(a, b)| a.clone() + b.clone()).collect();
        Self::new_unchecked(self.source.clone(), self.target.clone(), matrices)
    }

    pub fn scale(&self, k: &S) -> Self {
        Self { source: self.source.clone(), target: self.target.clone(), matrices: self.matrices.iter().map(|m| m.scale(k)).collect() }
    }

    pub fn is_zero(&self) -> bool {
        let eps = self.source.space().tolerance().eps;
        self.matrices.iter().all(|m| m.is_zero_within(eps))
    }

    /// Rank of the fiber map at the base point, which decides injectivity
    /// and surjectivity.
    pub fn fiber_rank(&self) -> usize {
        let tol = self.source.space().tolerance();
        self.matrices[self.source.space().base_point()].rank(tol.rank)
    }

    /// Coordinates `φ_ij(y)` flattened at index `(i * m + j) * |S| + y`.
    pub fn to_vector(&self) -> Vec<S> {
        let (n, m, p) = (self.source.rank(), self.target.rank(), self.matrices.len());
        let mut v = vec![S::zero(); n * m * p];
        for (y, mat) in self.matrices.iter().enumerate() {
            for i in 0..n {
                for j in 0..m {
                    v[(i * m + j) * p + y] = mat[(i, j)].clone();
                }
            }
        }
        v
    }
}

/// An `F`-basis of `Hom_A(E, F)`.
#[derive(Clone, Debug)]
pub struct HomBasis<S> {
    source: Equation<S>,
    target: Equation<S>,
    morphisms: Vec<Morphism<S>>,
}

impl<S: Scalar> HomBasis<S> {
    pub fn dim(&self) -> usize {
        self.morphisms.len()
    }

    pub fn morphisms(&self) -> &[Morphism<S>] {
        &self.morphisms
    }

    pub fn source(&self) -> &Equation<S> {
        &self.source
    }

    pub fn target(&self) -> &Equation<S> {
        &self.target
    }

    /// `Σ c_k φ_k`.
    pub fn combination(&self, coeffs: &[S]) -> Result<Morphism<S>> {
        assert_eq!(coeffs.len(), self.morphisms.len());
        let mut acc = Morphism::zero(&self.source, &self.target)?;
        for (c, m) in coeffs.iter().zip(&self.morphisms) {
            acc = acc.add(&m.scale(c))?;
        }
        Ok(acc)
    }

    /// Whether `φ` lies in the span of the basis.
    pub fn contains(&self, phi: &Morphism<S>) -> bool {
        let tol = self.source.space().tolerance();
        let v = phi.to_vector();
        if self.morphisms.is_empty() {
            return v.iter().all(|x| x.is_negligible(tol.eps));
        }
        let rows: Vec<Vec<S>> = self.morphisms.iter().map(Morphism::to_vector).collect();
        let basis = Matrix::from_rows(rows);
        let stacked = basis.vstack(&Matrix::from_rows(vec![v]));
        stacked.rank(tol.rank) == basis.rank(tol.rank)
    }
}

/// Solve the intertwining system on the generators of `G` and verify each
/// basis element on the whole group.
pub fn hom_space<S: Scalar>(e: &Equation<S>, f: &Equation<S>) -> Result<HomBasis<S>> {
    e.require_same_space(f)?;
    let space = e.space();
    let group = space.group();
    let tol = space.tolerance();
    let (n, m, p) = (e.rank(), f.rank(), space.size());
    let unknown = |i: usize, j: usize, y: usize| (i * m + j) * p + y;
    let gens = group.generator_ids();
    let mut system = Matrix::<S>::zeros(gens.len() * p * n * m, n * m * p);
    let mut row = 0;
    for &g in &gens {
        for y in 0..p {
            let src = group.act_inv(g, y);
            let fg = f.at(g, y);
            let eg = e.at(g, y);
            for i in 0..n {
                for k in 0..m {
                    // Σ_j φ_ij(g⁻¹y) F^g_jk(y) - Σ_j E^g_ij(y) φ_jk(y) = 0
                    for j in 0..m {
                        let c = unknown(i, j, src);
                        system[(row, c)] = system[(row, c)].clone() + fg[(j, k)].clone();
                    }
                    for j in 0..n {
                        let c = unknown(j, k, y);
                        system[(row, c)] = system[(row, c)].clone() - eg[(i, j)].clone();
                    }
                    row += 1;
                }
            }
        }
    }
    let null = system.nullspace(tol.rank);
    let mut morphisms = Vec::with_capacity(null.cols());
    for k in 0..null.cols() {
        let matrices = (0..p).map(|y| Matrix::from_fn(n, m, |i, j| null[(unknown(i, j, y), k)].clone())).collect();
        morphisms.push(Morphism::new(e.clone(), f.clone(), matrices)?);
    }
    Ok(HomBasis { source: e.clone(), target: f.clone(), morphisms })
}

pub fn symmetries<S: Scalar>(e: &Equation<S>) -> Result<HomBasis<S>> {
    hom_space(e, e)
}

/// The fiber map `E_x -> F_x` of `φ`.
pub fn pointwise_map<S: Scalar>(phi: &Morphism<S>, x: usize) -> Matrix<S> {
    phi.at(x).clone()
}

pub fn is_injective<S: Scalar>(phi: &Morphism<S>) -> bool {
    phi.fiber_rank() == phi.source().rank()
}

pub fn is_surjective<S: Scalar>(phi: &Morphism<S>) -> bool {
    phi.fiber_rank() == phi.target().rank()
}

pub fn is_isomorphism<S: Scalar>(phi: &Morphism<S>) -> bool {
    is_injective(phi) && is_surjective(phi)
}

/// `ker φ` as an equation together with its embedding into the source.
pub fn kernel<S: Scalar>(phi: &Morphism<S>) -> Result<(Equation<S>, Morphism<S>)> {
    let space = phi.source().space();
    let tol = space.tolerance();
    let fiber = phi.at(space.base_point());
    let rows = fiber.left_nullspace(tol.rank);
    equivalence::submodule(phi.source(), &rows)
}

/// `im φ` as an equation together with its embedding into the target.
pub fn image<S: Scalar>(phi: &Morphism<S>) -> Result<(Equation<S>, Morphism<S>)> {
    let space = phi.source().space();
    let tol = space.tolerance();
    let fiber = phi.at(space.base_point());
    let rows = fiber.row_space(tol.rank);
    equivalence::submodule(phi.target(), &rows)
}

/// Outcome of a simplicity test.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Simplicity {
    Simple,
    NotSimple,
    /// Simple over the field is neither certified nor refuted (for example
    /// a rational module that splits only after extending scalars).
    Undetermined,
}

/// Simplicity via the fiber: `span{ρ(h)}` is all of `End(V)` exactly when
/// `V` is absolutely simple.
pub fn is_simple<S: Scalar>(e: &Equation<S>) -> Result<Simplicity> {
    let fiber = equivalence::fiber(e);
    if fiber.dim() == 0 {
        return Ok(Simplicity::NotSimple);
    }
    if fiber.span_dimension() == fiber.dim() * fiber.dim() {
        return Ok(Simplicity::Simple);
    }
    if S::ALGEBRAICALLY_CLOSED {
        return Ok(Simplicity::NotSimple);
    }
    let ends = equivalence::fiber_hom(&fiber, &fiber);
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    let tol = e.space().tolerance();
    for x in candidate_endomorphisms(&ends, DEFAULT_RETRIES, &mut rng) {
        for lambda in S::eigenvalues(&x, tol.eps) {
            let shifted = x.clone() - Matrix::identity(fiber.dim()).scale(&lambda);
            let r = shifted.rank(tol.rank);
            if r > 0 && r < fiber.dim() {
                return Ok(Simplicity::NotSimple);
            }
        }
    }
    Ok(Simplicity::Undetermined)
}

pub const DEFAULT_RETRIES: usize = 8;

/// Seed and retry budget for randomized splitting and isomorphism search.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SearchConfig {
    pub seed: u64,
    pub retries: usize,
}

impl Default for SearchConfig {
    fn default() -> Self {
        Self { seed: 0, retries: DEFAULT_RETRIES }
    }
}

/// Basis elements first, then `retries` random combinations.
fn candidate_endomorphisms<S: Scalar>(basis: &[Matrix<S>], retries: usize, rng: &mut ChaCha8Rng) -> Vec<Matrix<S>> {
    let mut out: Vec<Matrix<S>> = basis.to_vec();
    if basis.is_empty() {
        return out;
    }
    for _ in 0..retries {
        let mut acc = Matrix::zeros(basis[0].rows(), basis[0].cols());
        for b in basis {
            acc = acc + b.scale(&S::sample(rng));
        }
        out.push(acc);
    }
    out
}

/// A summand of a decomposition with its embedding into the original equation.
#[derive(Clone, Debug)]
pub struct Summand<S> {
    pub equation: Equation<S>,
    pub embedding: Morphism<S>,
}

enum Split<S> {
    Parts(Vec<Matrix<S>>),
    /// One eigenvalue whose generalized eigenspace is everything.
    Local,
    Unknown,
}

/// Invariant subspaces of `V` cut out by the eigenvalues of `x`.
fn eigen_split<S: Scalar>(x: &Matrix<S>, eps: f64, rank_tol: f64) -> Split<S> {
    let d = x.rows();
    let values = S::eigenvalues(x, eps);
    if values.is_empty() {
        return Split::Unknown;
    }
    let power = if S::EXACT { d } else { 1 };
    let mut parts = Vec::new();
    let mut rest = Matrix::identity(d);
    let mut covered = 0;
    for lambda in &values {
        let shifted = (x.clone() - Matrix::identity(d).scale(lambda)).pow(power);
        let w = shifted.left_nullspace(rank_tol);
        if w.rows() > 0 {
            covered += w.rows();
            parts.push(w);
        }
        rest = &rest * &shifted;
    }
    if parts.len() == 1 && covered == d {
        return Split::Local;
    }
    if covered < d {
        let r = rest.row_space(rank_tol);
        if r.rows() + covered != d {
            return Split::Unknown;
        }
        parts.push(r);
    }
    if parts.len() < 2 {
        return Split::Unknown;
    }
    let stacked = parts.iter().skip(1).fold(parts[0].clone(), |acc, p| acc.vstack(p));
    if stacked.rank(rank_tol) != d {
        return Split::Unknown;
    }
    Split::Parts(parts)
}

/// Split `E` into indecomposable summands by eigenspaces of random
/// symmetries, then verify that the summands reassemble to `E`.
pub fn decompose<S: Scalar>(e: &Equation<S>, config: SearchConfig) -> Result<Vec<Summand<S>>> {
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let leaves = split_recursive(e, config.retries, &mut rng)?;
    let summands: Vec<Summand<S>> =
        leaves.into_iter().map(|(equation, embedding)| Summand { equation, embedding }).collect();
    if !summands.is_empty() {
        let total = summands.iter().skip(1).try_fold(summands[0].equation.clone(), |acc, s| acc.direct_sum(&s.equation))?;
        let matrices = (0..e.space().size())
            .map(|y| {
                summands.iter().skip(1).fold(summands[0].embedding.at(y).clone(), |acc, s| acc.vstack(s.embedding.at(y)))
            })
            .collect();
        let assembled = Morphism::new(total, e.clone(), matrices)?;
        if !is_isomorphism(&assembled) {
            return Err(Error::NoIsoFound("summands do not reassemble the equation".into()));
        }
    }
    Ok(summands)
}

fn split_recursive<S: Scalar>(e: &Equation<S>, retries: usize, rng: &mut ChaCha8Rng) -> Result<Vec<(Equation<S>, Morphism<S>)>> {
    if e.rank() == 0 {
        return Ok(Vec::new());
    }
    let leaf = || Ok(vec![(e.clone(), Morphism::identity(e))]);
    if e.rank() == 1 {
        return leaf();
    }
    let basis = symmetries(e)?;
    if basis.dim() <= 1 {
        return leaf();
    }
    let space = e.space();
    let base = space.base_point();
    let tol = space.tolerance();
    let fibers: Vec<Matrix<S>> = basis.morphisms().iter().map(|m| m.at(base).clone()).collect();
    let mut all_local = true;
    for x in candidate_endomorphisms(&fibers, retries, rng) {
        match eigen_split(&x, tol.eps, tol.rank) {
            Split::Parts(parts) => {
                let mut out = Vec::new();
                for w in parts {
                    let (sub, embed) = equivalence::submodule(e, &w)?;
                    for (leaf_eq, leaf_embed) in split_recursive(&sub, retries, rng)? {
                        let composite = leaf_embed.then(&embed)?;
                        out.push((leaf_eq, composite));
                    }
                }
                return Ok(out);
            }
            Split::Local => {}
            Split::Unknown => all_local = false,
        }
    }
    if all_local || is_simple(e)? == Simplicity::Simple {
        leaf()
    } else {
        Err(Error::SplittingInconclusive { retries })
    }
}

/// Search `Hom_A(E, F)` for an isomorphism: basis elements, then seeded
/// random combinations.
pub fn find_isomorphism<S: Scalar>(e: &Equation<S>, f: &Equation<S>, config: SearchConfig) -> Result<Morphism<S>> {
    if e.rank() != f.rank() {
        return Err(Error::NoIsoFound(format!("ranks differ ({} vs {})", e.rank(), f.rank())));
    }
    let basis = hom_space(e, f)?;
    if e.rank() == 0 {
        return Morphism::zero(e, f);
    }
    for m in basis.morphisms() {
        if is_isomorphism(m) {
            return Ok(m.clone());
        }
    }
    if basis.dim() > 1 {
        let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
        for _ in 0..config.retries.max(1) * 2 {
            let coeffs: Vec<S> = (0..basis.dim()).map(|_| S::sample(&mut rng)).collect();
            let m = basis.combination(&coeffs)?;
            if is_isomorphism(&m) {
                return Ok(m);
            }
        }
    }
    Err(Error::NoIsoFound(format!("hom space of dimension {} has no invertible element found", basis.dim())))
}

pub fn are_isomorphic<S: Scalar>(e: &Equation<S>, f: &Equation<S>) -> bool {
    find_isomorphism(e, f, SearchConfig::default()).is_ok()
}

/// The fiber `H`-module of a morphism's source; convenience for reports.
pub fn source_fiber<S: Scalar>(phi: &Morphism<S>) -> HModule<S> {
    equivalence::fiber(phi.source())
}
