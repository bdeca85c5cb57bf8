//! Invariant structures: fixed vectors of tensor constructions, conserved
//! quantities along solutions, self-duality and composition principles.
//!
//! Symmetric elements are read as bilinear forms by polarization: the
//! coordinate of `e_i e_j` (`i < j`) is split evenly between `(i, j)` and
//! `(j, i)`. Alternating elements give `B_ij = α_ij = -B_ji`.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::equation::{pairs, sym2_matrix, wedge2_matrix, Equation, ModuleElement};
use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::scalar::Scalar;
use crate::skew::Function;
use crate::solver::{self, Morphism, SearchConfig};

/// A basis of `{α : g·α = α for all g}`.
pub fn invariant_vectors<S: Scalar>(e: &Equation<S>) -> Result<Vec<ModuleElement<S>>> {
    let space = e.space();
    let group = space.group();
    let tol = space.tolerance();
    let (n, p) = (e.rank(), space.size());
    let gens = group.generator_ids();
    let mut system = Matrix::<S>::zeros(gens.len() * n * p, n * p);
    for (b, &s) in gens.iter().enumerate() {
        for y in 0..p {
            let src = group.act_inv(s, y);
            let m = e.at(s, y);
            for j in 0..n {
                let row = b * n * p + j * p + y;
                for i in 0..n {
                    let col = i * p + src;
                    system[(row, col)] = system[(row, col)].clone() + m[(i, j)].clone();
                }
                let col = j * p + y;
                system[(row, col)] = system[(row, col)].clone() - S::one();
            }
        }
    }
    let null = system.nullspace(tol.rank);
    let basis: Vec<ModuleElement<S>> = (0..null.cols())
        .map(|c| {
            let v: Vec<S> = (0..null.rows()).map(|r| null[(r, c)].clone()).collect();
            ModuleElement::from_vector(n, p, &v)
        })
        .collect();
    let via_hom = solver::hom_space(&Equation::trivial(space.clone()), e)?.dim();
    if via_hom != basis.len() {
        return Err(Error::InconsistentConnection(format!(
            "{} fixed vectors but {} solutions of type 𝟙 -> E",
            basis.len(),
            via_hom
        )));
    }
    Ok(basis)
}

pub fn is_invariant<S: Scalar>(e: &Equation<S>, alpha: &ModuleElement<S>) -> bool {
    let eps = e.space().tolerance().eps;
    alpha.rank() == e.rank() && e.space().group().generator_ids().into_iter().all(|g| e.act(g, alpha).approx_eq(alpha, eps))
}

/// An element `α` of a host equation with `g·α = α`.
#[derive(Clone, Debug)]
pub struct InvariantStructure<S> {
    host: Equation<S>,
    coords: ModuleElement<S>,
}

impl<S: Scalar> InvariantStructure<S> {
    pub fn new(host: Equation<S>, coords: ModuleElement<S>) -> Result<Self> {
        if coords.rank() != host.rank() {
            return Err(Error::ShapeMismatch("structure rank must equal host rank".into()));
        }
        if !is_invariant(&host, &coords) {
            return Err(Error::NotInvariant("g·α differs from α for some generator".into()));
        }
        Ok(Self { host, coords })
    }

    pub fn host(&self) -> &Equation<S> {
        &self.host
    }

    pub fn coords(&self) -> &ModuleElement<S> {
        &self.coords
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PowerKind {
    Sym2,
    Wedge2,
    /// `∧ⁿ` with `n` the common rank of source and target.
    WedgeTop,
}

impl PowerKind {
    pub fn host<S: Scalar>(self, e: &Equation<S>) -> Result<Equation<S>> {
        match self {
            PowerKind::Sym2 => e.sym2(),
            PowerKind::Wedge2 => e.wedge2(),
            PowerKind::WedgeTop => e.wedge_top(),
        }
    }

    fn map<S: Scalar>(self, m: &Matrix<S>) -> Matrix<S> {
        match self {
            PowerKind::Sym2 => sym2_matrix(m),
            PowerKind::Wedge2 => wedge2_matrix(m),
            PowerKind::WedgeTop => Matrix::scalar(m.det()),
        }
    }
}

/// Outcome of pushing an invariant along a solution.
#[derive(Clone, Debug)]
pub struct ConservedReport<S> {
    pub kind: PowerKind,
    /// The pushforward, an element of the same power of the target.
    pub pushforward: ModuleElement<S>,
    pub invariant: bool,
    /// `Some` when the target power has the identity connection, so that
    /// invariance means constancy.
    pub constant: Option<bool>,
}

impl<S> ConservedReport<S> {
    pub fn passed(&self) -> bool {
        self.invariant && self.constant != Some(false)
    }
}

fn has_identity_connection<S: Scalar>(e: &Equation<S>) -> bool {
    let eps = e.space().tolerance().eps;
    let id = Matrix::identity(e.rank());
    e.space().group().generator_ids().into_iter().all(|g| (0..e.space().size()).all(|y| e.at(g, y).approx_eq(&id, eps)))
}

/// Push `α ∈ P(E)` forward along a solution `φ: E -> F` and check the result.
pub fn conserved_quantity_check<S: Scalar>(
    kind: PowerKind,
    alpha: &ModuleElement<S>,
    phi: &Morphism<S>,
) -> Result<ConservedReport<S>> {
    phi.verify()?;
    let (e, f) = (phi.source(), phi.target());
    if kind == PowerKind::WedgeTop && e.rank() != f.rank() {
        return Err(Error::ShapeMismatch("top exterior powers need equal ranks".into()));
    }
    let host = kind.host(e)?;
    InvariantStructure::new(host, alpha.clone())?;
    let target_host = kind.host(f)?;
    let p = e.space().size();
    let rows: Vec<Matrix<S>> = (0..p).map(|y| &alpha.row_at(y) * &kind.map(phi.at(y))).collect();
    let pushforward = if target_host.rank() == 0 {
        ModuleElement::new(Vec::new())
    } else {
        ModuleElement::from_rows(&rows)
    };
    let invariant = is_invariant(&target_host, &pushforward);
    let constant = has_identity_connection(&target_host).then(|| {
        let eps = e.space().tolerance().eps;
        pushforward.coords().iter().all(|c| normalized_constant(c, eps))
    });
    Ok(ConservedReport { kind, pushforward, invariant, constant })
}

/// `max - min <= ε (1 + max |value|)`.
fn normalized_constant<S: Scalar>(f: &Function<S>, eps: f64) -> bool {
    if S::EXACT {
        return f.is_constant(0.0);
    }
    let scale = f.values().iter().map(|v| v.magnitude()).fold(0.0, f64::max);
    f.values().iter().all(|v| f.values().iter().all(|w| (v.clone() - w.clone()).magnitude() <= eps * (1.0 + scale)))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FormKind {
    Symmetric,
    Alternating,
}

/// Per-point bilinear matrices `B(y)` of an element of `S²(E*)` or `∧²(E*)`.
pub fn bilinear_form<S: Scalar>(kind: FormKind, n: usize, alpha: &ModuleElement<S>) -> Vec<Matrix<S>> {
    let idx = pairs(n, kind == FormKind::Symmetric);
    let half = S::from_ratio(1, 2);
    let points = alpha.coords().first().map_or(0, Function::len);
    (0..points)
        .map(|y| {
            let mut b = Matrix::<S>::zeros(n, n);
            for (c, &(i, j)) in idx.iter().enumerate() {
                let v = alpha.coords()[c].at(y).clone();
                match kind {
                    FormKind::Symmetric if i == j => b[(i, i)] = v,
                    FormKind::Symmetric => {
                        b[(i, j)] = v.clone() * half.clone();
                        b[(j, i)] = v * half.clone();
                    }
                    FormKind::Alternating => {
                        b[(i, j)] = v.clone();
                        b[(j, i)] = S::zero() - v;
                    }
                }
            }
            b
        })
        .collect()
}

/// A basis of invariant symmetric or alternating forms on `E`, as elements
/// of `S²(E*)` or `∧²(E*)`.
pub fn invariant_forms<S: Scalar>(e: &Equation<S>, kind: FormKind) -> Result<Vec<ModuleElement<S>>> {
    let dual = e.dual()?;
    let host = match kind {
        FormKind::Symmetric => dual.sym2()?,
        FormKind::Alternating => dual.wedge2()?,
    };
    if host.rank() == 0 {
        return Ok(Vec::new());
    }
    invariant_vectors(&host)
}

/// `F_α: E -> E*`, `F_α(e)(e') = α(e, e')`.
pub fn form_morphism<S: Scalar>(e: &Equation<S>, kind: FormKind, alpha: &ModuleElement<S>) -> Result<Morphism<S>> {
    Morphism::new(e.clone(), e.dual()?, bilinear_form(kind, e.rank(), alpha))
}

#[derive(Clone, Debug)]
pub struct SelfDuality<S> {
    pub kind: FormKind,
    pub form: ModuleElement<S>,
    pub iso: Morphism<S>,
}

fn nondegenerate<S: Scalar>(forms: &[Matrix<S>], rank_tol: f64) -> bool {
    forms.iter().all(|b| b.rank(rank_tol) == b.rows())
}

/// Look for a nondegenerate invariant symmetric form, then an alternating
/// one, and return the induced isomorphism `E -> E*`.
pub fn self_dual_check<S: Scalar>(e: &Equation<S>, config: SearchConfig) -> Result<Option<SelfDuality<S>>> {
    let tol = e.space().tolerance();
    let n = e.rank();
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    for kind in [FormKind::Symmetric, FormKind::Alternating] {
        let basis = invariant_forms(e, kind)?;
        if basis.is_empty() {
            continue;
        }
        let mut candidates = basis.clone();
        for _ in 0..config.retries {
            let mut combo = basis[0].clone();
            for (k, b) in basis.iter().enumerate() {
                let c = S::sample(&mut rng);
                let scaled = ModuleElement::new(b.coords().iter().map(|f| f.scale(&c)).collect());
                combo = if k == 0 { scaled } else { add_elements(&combo, &scaled) };
            }
            candidates.push(combo);
        }
        for alpha in candidates {
            if !nondegenerate(&bilinear_form(kind, n, &alpha), tol.rank) {
                continue;
            }
            let iso = form_morphism(e, kind, &alpha)?;
            if solver::is_isomorphism(&iso) {
                return Ok(Some(SelfDuality { kind, form: alpha, iso }));
            }
        }
    }
    Ok(None)
}

fn add_elements<S: Scalar>(a: &ModuleElement<S>, b: &ModuleElement<S>) -> ModuleElement<S> {
    ModuleElement::new(a.coords().iter().zip(b.coords()).map(|(x, y)| x + y).collect())
}

/// `S²(Hom_k(E, F)*) ⊗ Hom_k(E, F)`, basis index `pair * r + c`.
pub fn composition_host<S: Scalar>(e: &Equation<S>, f: &Equation<S>) -> Result<Equation<S>> {
    let hom = e.hom(f)?;
    hom.dual()?.sym2()?.tensor(&hom)
}

/// Coordinates of a pointwise map in `Hom_k(E, F)`: index `b * n + a` holds
/// `Φ_ab` (`e_a -> f_b`).
fn hom_coords<S: Scalar>(m: &Matrix<S>) -> Vec<S> {
    let (n, k) = (m.rows(), m.cols());
    (0..k).flat_map(|b| (0..n).map(move |a| (a, b))).map(|(a, b)| m[(a, b)].clone()).collect()
}

/// `T_α(φ, ψ) = α(φ, ψ)`, checked to be a solution.
pub fn composition_principle<S: Scalar>(alpha: &InvariantStructure<S>, phi: &Morphism<S>, psi: &Morphism<S>) -> Result<Morphism<S>> {
    phi.verify()?;
    psi.verify()?;
    let (e, f) = (phi.source(), phi.target());
    if psi.source() != e || psi.target() != f {
        return Err(Error::ShapeMismatch("both solutions must share source and target".into()));
    }
    let (n, m) = (e.rank(), f.rank());
    let r = n * m;
    let npairs = r * (r + 1) / 2;
    if alpha.host().rank() != npairs * r || !e.same_space(alpha.host()) {
        return Err(Error::ShapeMismatch("structure does not live on the composition host".into()));
    }
    let matrices = (0..e.space().size())
        .map(|y| {
            let u = hom_coords(phi.at(y));
            let v = hom_coords(psi.at(y));
            let mut out = Matrix::<S>::zeros(n, m);
            for c in 0..r {
                let slice = ModuleElement::new((0..npairs).map(|p| alpha.coords().coords()[p * r + c].clone()).collect());
                let b = &bilinear_form(FormKind::Symmetric, r, &slice)[y];
                let mut acc = S::zero();
                for i in 0..r {
                    for j in 0..r {
                        acc = acc + u[i].clone() * b[(i, j)].clone() * v[j].clone();
                    }
                }
                out[(c % n, c / n)] = acc;
            }
            out
        })
        .collect();
    Morphism::new(e.clone(), f.clone(), matrices)
        .map_err(|err| Error::NotASolution(format!("T_α(φ, ψ) is not a solution: {err}")))
}
