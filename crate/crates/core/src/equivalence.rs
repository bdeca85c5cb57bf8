//! Equations versus representations of the base-point stabilizer `H`.
//!
//! The fiber at the base point turns an equation into an `H`-module, and
//! induction `V -> Γ(S × V)` goes back. With the row-vector convention the
//! fiber matrices compose in reverse: `ρ(h₁h₂) = ρ(h₂) ρ(h₁)`.

use std::collections::VecDeque;
use std::sync::Arc;

use crate::equation::Equation;
use crate::error::{Error, Result};
use crate::group::{ElementId, HomogeneousSpace, Transversal};
use crate::linalg::Matrix;
use crate::scalar::Scalar;
use crate::solver::{self, Morphism, SearchConfig};

/// A finite-dimensional module over the stabilizer of the base point.
#[derive(Clone, Debug)]
pub struct HModule<S> {
    space: Arc<HomogeneousSpace>,
    dim: usize,
    /// Indexed by position in the stabilizer's sorted element list.
    rho: Vec<Matrix<S>>,
}

impl<S: Scalar> PartialEq for HModule<S> {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.space, &other.space) && self.rho == other.rho
    }
}

impl<S: Scalar> HModule<S> {
    /// Build from a value for every element of `H`, then validate.
    pub fn from_fn(space: Arc<HomogeneousSpace>, dim: usize, mut rho: impl FnMut(ElementId) -> Matrix<S>) -> Result<Self> {
        let rho = space.stabilizer().elements().iter().map(|&h| rho(h)).collect();
        let m = Self { space, dim, rho };
        m.validate()?;
        Ok(m)
    }

    /// Extend generator matrices to `H` by `ρ(s k) = ρ(k) ρ(s)`, checking
    /// consistency along the way.
    pub fn from_generators(space: Arc<HomogeneousSpace>, dim: usize, generators: Vec<(ElementId, Matrix<S>)>) -> Result<Self> {
        let stab = space.stabilizer().clone();
        let group = space.group();
        let eps = space.tolerance().eps;
        for (h, m) in &generators {
            if !stab.contains(*h) {
                return Err(Error::ElementNotInH(*h));
            }
            if m.rows() != dim || m.cols() != dim {
                return Err(Error::InvalidHModule(format!("generator matrices must be {dim}x{dim}")));
            }
        }
        let mut table: Vec<Option<Matrix<S>>> = vec![None; stab.order()];
        table[stab.position(0).expect("identity is in H")] = Some(Matrix::identity(dim));
        let mut queue = VecDeque::from([0usize]);
        while let Some(k) = queue.pop_front() {
            let rk = table[stab.position(k).expect("queued elements are in H")].clone().expect("known");
            for (s, rs) in &generators {
                let sk = group.mul(*s, k);
                let candidate = &rk * rs;
                let pos = stab.position(sk).expect("H is closed");
                match &table[pos] {
                    Some(existing) if !existing.approx_eq(&candidate, eps) => {
                        return Err(Error::InvalidHModule(format!("relations violated at element {sk}")));
                    }
                    Some(_) => {}
                    None => {
                        table[pos] = Some(candidate);
                        queue.push_back(sk);
                    }
                }
            }
        }
        if table.iter().any(Option::is_none) {
            return Err(Error::InvalidHModule("generators do not generate the stabilizer".into()));
        }
        let m = Self { space, dim, rho: table.into_iter().map(|m| m.expect("checked")).collect() };
        m.validate()?;
        Ok(m)
    }

    pub fn trivial(space: Arc<HomogeneousSpace>) -> Self {
        let n = space.stabilizer().order();
        Self { space, dim: 1, rho: vec![Matrix::identity(1); n] }
    }

    /// The regular module `F[H]` with `h · e_k = e_{hk}`.
    pub fn regular(space: Arc<HomogeneousSpace>) -> Self {
        let stab = space.stabilizer().clone();
        let group = space.group().clone();
        let n = stab.order();
        let rho = stab
            .elements()
            .iter()
            .map(|&h| {
                let mut m = Matrix::zeros(n, n);
                for (k, &el) in stab.elements().iter().enumerate() {
                    let target = stab.position(group.mul(h, el)).expect("H is closed");
                    m[(k, target)] = S::one();
                }
                m
            })
            .collect();
        Self { space, dim: n, rho }
    }

    pub fn space(&self) -> &Arc<HomogeneousSpace> {
        &self.space
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn elements(&self) -> &[ElementId] {
        self.space.stabilizer().elements()
    }

    pub fn rho(&self, h: ElementId) -> Result<&Matrix<S>> {
        self.space.stabilizer().position(h).map(|p| &self.rho[p]).ok_or(Error::ElementNotInH(h))
    }

    pub fn validate(&self) -> Result<()> {
        let stab = self.space.stabilizer();
        let group = self.space.group();
        let eps = self.space.tolerance().eps;
        if self.rho.len() != stab.order() || self.rho.iter().any(|m| m.rows() != self.dim || m.cols() != self.dim) {
            return Err(Error::InvalidHModule("one square matrix per stabilizer element is required".into()));
        }
        if !self.rho[stab.position(0).expect("identity")].approx_eq(&Matrix::identity(self.dim), eps) {
            return Err(Error::InvalidHModule("identity does not act trivially".into()));
        }
        for (i, &a) in stab.elements().iter().enumerate() {
            if self.dim > 0 && self.rho[i].det().is_negligible(eps) {
                return Err(Error::InvalidHModule(format!("element {a} acts singularly")));
            }
            for (j, &b) in stab.elements().iter().enumerate() {
                let ab = stab.position(group.mul(a, b)).expect("H is closed");
                if !self.rho[ab].approx_eq(&(&self.rho[j] * &self.rho[i]), eps) {
                    return Err(Error::InvalidHModule(format!("not a representation at ({a}, {b})")));
                }
            }
        }
        Ok(())
    }

    pub fn direct_sum(&self, other: &Self) -> Self {
        let rho = self.rho.iter().zip(&other.rho).map(|(a, b)| a.direct_sum(b)).collect();
        Self { space: self.space.clone(), dim: self.dim + other.dim, rho }
    }

    pub fn tensor(&self, other: &Self) -> Self {
        let rho = self.rho.iter().zip(&other.rho).map(|(a, b)| a.kron(b)).collect();
        Self { space: self.space.clone(), dim: self.dim * other.dim, rho }
    }

    pub fn dual(&self) -> Self {
        let tol = self.space.tolerance();
        let rho = self.rho.iter().map(|m| m.inverse(tol.rank).expect("validated modules are invertible").transpose()).collect();
        Self { space: self.space.clone(), dim: self.dim, rho }
    }

    /// `dim span{ρ(h)}`; equals `dim²` exactly for absolutely simple modules.
    pub fn span_dimension(&self) -> usize {
        if self.dim == 0 {
            return 0;
        }
        let rows: Vec<Vec<S>> = self.rho.iter().map(|m| m.entries().to_vec()).collect();
        Matrix::from_rows(rows).rank(self.space.tolerance().rank)
    }

    /// `χ(h) = tr ρ(h)` in stabilizer order.
    pub fn character_values(&self) -> Vec<S> {
        self.rho.iter().map(Matrix::trace).collect()
    }
}

/// `V = E_{x₀}` with `ρ(h) = E^h(x₀)`.
pub fn fiber<S: Scalar>(e: &Equation<S>) -> HModule<S> {
    let space = e.space().clone();
    let base = space.base_point();
    let rho = space.stabilizer().elements().iter().map(|&h| e.at(h, base).clone()).collect();
    HModule { space, dim: e.rank(), rho }
}

/// `Γ(S × V)` over the space's own transversal.
pub fn induce<S: Scalar>(v: &HModule<S>) -> Result<Equation<S>> {
    induce_with(v, v.space.transversal())
}

/// `Γ(S × V)` with connection `E^g(y) = ρ(σ(y)⁻¹ g σ(g⁻¹y))`.
pub fn induce_with<S: Scalar>(v: &HModule<S>, sigma: &Transversal) -> Result<Equation<S>> {
    let space = v.space.clone();
    let group = space.group();
    let mut matrices = Vec::with_capacity(group.order());
    for g in group.elements() {
        let mut per_point = Vec::with_capacity(space.size());
        for y in 0..space.size() {
            let h = group.mul(group.mul(group.inv(sigma.get(y)), g), sigma.get(group.act_inv(g, y)));
            per_point.push(v.rho(h)?.clone());
        }
        matrices.push(per_point);
    }
    Equation::from_connection(space, v.dim, matrices)
}

/// `T(y) = E^{σ(y)}(y)`, the frame identifying `E_{x₀}` with `E_y`; as
/// per-point matrices it is an isomorphism `Γ(S × E_{x₀}) -> E`.
pub fn trivialization<S: Scalar>(e: &Equation<S>) -> Vec<Matrix<S>> {
    let space = e.space();
    let sigma = space.transversal();
    (0..space.size()).map(|y| e.at(sigma.get(y), y).clone()).collect()
}

/// The sub-equation generated by an `H`-stable subspace of the fiber (rows
/// of `w`), with its embedding.
pub fn submodule<S: Scalar>(e: &Equation<S>, w: &Matrix<S>) -> Result<(Equation<S>, Morphism<S>)> {
    let space = e.space().clone();
    let tol = space.tolerance();
    let v = fiber(e);
    let k = w.rows();
    let rho = if k == 0 {
        vec![Matrix::zeros(0, 0); v.rho.len()]
    } else {
        v.rho
            .iter()
            .map(|r| {
                Matrix::solve_left(w, &(w * r), tol.rank)
                    .ok_or_else(|| Error::InvalidHModule("subspace is not stable under the stabilizer".into()))
            })
            .collect::<Result<Vec<_>>>()?
    };
    let sub = induce(&HModule { space, dim: k, rho })?;
    let frames = trivialization(e);
    let matrices = frames.iter().map(|t| if k == 0 { Matrix::zeros(0, e.rank()) } else { w * t }).collect();
    let embedding = Morphism::new(sub.clone(), e.clone(), matrices)?;
    Ok((sub, embedding))
}

/// The quotient of `E` by the sub-equation generated by the fiber subspace
/// `w`, with the projection `E -> E/W`.
pub fn quotient<S: Scalar>(e: &Equation<S>, w: &Matrix<S>) -> Result<(Equation<S>, Morphism<S>)> {
    let space = e.space().clone();
    let tol = space.tolerance();
    let n = e.rank();
    let w = if w.rows() == 0 { Matrix::zeros(0, n) } else { w.row_space(tol.rank) };
    let k = w.rows();
    let complement = Matrix::complement_rows(&w, n, tol.rank);
    let q = complement.rows();
    let basis = if k == 0 { complement.clone() } else { w.vstack(&complement) };
    let binv = basis.inverse(tol.rank).ok_or_else(|| Error::InvalidHModule("degenerate subspace basis".into()))?;
    let tail: Vec<usize> = (k..n).collect();
    let projection = binv.select_cols(&tail);
    let v = fiber(e);
    let rho = v
        .rho
        .iter()
        .map(|r| if q == 0 { Matrix::zeros(0, 0) } else { &(&complement * r) * &projection })
        .collect();
    let quotient = induce(&HModule { space, dim: q, rho })?;
    let matrices = trivialization(e)
        .iter()
        .map(|t| {
            let tinv = t.inverse(tol.rank).expect("connection matrices are invertible");
            if q == 0 { Matrix::zeros(n, 0) } else { &tinv * &projection }
        })
        .collect();
    let map = Morphism::new(e.clone(), quotient.clone(), matrices)?;
    Ok((quotient, map))
}

/// An isomorphism `E -> Γ(S × E_{x₀})` found in `Hom_A`.
pub fn roundtrip_iso<S: Scalar>(e: &Equation<S>, config: SearchConfig) -> Result<Morphism<S>> {
    let induced = induce(&fiber(e))?;
    solver::find_isomorphism(e, &induced, config).map_err(|err| Error::NoIsoFound(format!("round trip: {err}")))
}

/// The closed-form isomorphism `E -> Γ(S × E_{x₀})`, `y -> T(y)⁻¹`.
pub fn explicit_roundtrip<S: Scalar>(e: &Equation<S>) -> Result<Morphism<S>> {
    let tol = e.space().tolerance();
    let induced = induce(&fiber(e))?;
    let matrices = trivialization(e).iter().map(|t| t.inverse(tol.rank).expect("connection matrices are invertible")).collect();
    Morphism::new(e.clone(), induced, matrices)
}

/// The isomorphism `Γ_σ(S × V) -> Γ_σ'(S × V)`, `y -> ρ(γ(y))` with
/// `γ(y) = σ'(y)⁻¹ σ(y)`.
pub fn transversal_independence<S: Scalar>(v: &HModule<S>, sigma: &Transversal, sigma_prime: &Transversal) -> Result<Morphism<S>> {
    let group = v.space.group();
    let source = induce_with(v, sigma)?;
    let target = induce_with(v, sigma_prime)?;
    let matrices = (0..v.space.size())
        .map(|y| v.rho(group.mul(group.inv(sigma_prime.get(y)), sigma.get(y))).cloned())
        .collect::<Result<Vec<_>>>()?;
    let phi = Morphism::new(source, target, matrices)?;
    if !solver::is_isomorphism(&phi) {
        return Err(Error::NoIsoFound("transversal change map is not invertible".into()));
    }
    Ok(phi)
}

/// Basis of `Hom_{F[H]}(U, V)`: matrices `M` with `ρ_U(h) M = M ρ_V(h)`,
/// solved directly on the fiber over every element of `H`.
pub fn fiber_hom<S: Scalar>(u: &HModule<S>, v: &HModule<S>) -> Vec<Matrix<S>> {
    let (du, dv) = (u.dim, v.dim);
    let tol = u.space.tolerance();
    if du * dv == 0 {
        return Vec::new();
    }
    let mut system = Matrix::<S>::zeros(u.rho.len() * du * dv, du * dv);
    let mut row = 0;
    for (ru, rv) in u.rho.iter().zip(&v.rho) {
        for i in 0..du {
            for k in 0..dv {
                for j in 0..du {
                    let c = j * dv + k;
                    system[(row, c)] = system[(row, c)].clone() + ru[(i, j)].clone();
                }
                for j in 0..dv {
                    let c = i * dv + j;
                    system[(row, c)] = system[(row, c)].clone() - rv[(j, k)].clone();
                }
                row += 1;
            }
        }
    }
    let null = system.nullspace(tol.rank);
    (0..null.cols()).map(|c| Matrix::from_fn(du, dv, |i, j| null[(i * dv + j, c)].clone())).collect()
}

/// One line of a structure-preservation check.
#[derive(Clone, Debug)]
pub struct StructureCheck<S> {
    pub name: &'static str,
    pub iso: Result<Morphism<S>>,
}

impl<S> StructureCheck<S> {
    pub fn passed(&self) -> bool {
        self.iso.is_ok()
    }
}

/// Induction preserves `⊕`, `⊗` and duals, each witnessed by an explicit
/// isomorphism.
pub fn grothendieck_check<S: Scalar>(u: &HModule<S>, v: &HModule<S>, config: SearchConfig) -> Result<Vec<StructureCheck<S>>> {
    let iu = induce(u)?;
    let iv = induce(v)?;
    let pairs = [
        ("direct_sum", induce(&u.direct_sum(v))?, iu.direct_sum(&iv)?),
        ("tensor", induce(&u.tensor(v))?, iu.tensor(&iv)?),
        ("dual", induce(&u.dual())?, iu.dual()?),
    ];
    Ok(pairs
        .into_iter()
        .map(|(name, a, b)| StructureCheck { name, iso: solver::find_isomorphism(&a, &b, config) })
        .collect())
}

fn find_generator(space: &HomogeneousSpace, order: usize) -> Option<ElementId> {
    let group = space.group();
    space.stabilizer().elements().iter().copied().find(|&h| group.element_order(h) == order)
}

/// Irreducible modules of a cyclic stabilizer `⟨c⟩` of order `m`:
/// `c -> ω^k`. Fails when some `ω^k` is outside the field.
pub fn cyclic_irreps<S: Scalar>(space: &Arc<HomogeneousSpace>) -> Result<Vec<(String, HModule<S>)>> {
    let m = space.stabilizer().order();
    let c = find_generator(space, m).ok_or_else(|| Error::Unsupported("stabilizer is not cyclic".into()))?;
    let mut out = Vec::with_capacity(m);
    for k in 0..m {
        let w = S::root_of_unity(k as i64, m as i64).ok_or(Error::CharacterBackendMismatch { backend: S::NAME })?;
        let name = match (k, m) {
            (0, _) => "trivial".to_string(),
            (1, 2) => "sign".to_string(),
            _ => format!("chi{k}"),
        };
        out.push((name, HModule::from_generators(space.clone(), 1, vec![(c, Matrix::scalar(w))])?));
    }
    Ok(out)
}

/// Irreducible modules of a dihedral stabilizer `⟨r, f⟩` of order `2m`:
/// the one-dimensional characters and the two-dimensional modules with
/// `r -> [[0, 1], [-1, 2cos(2πk/m)]]`, `f -> [[0, 1], [1, 0]]`.
pub fn dihedral_irreps<S: Scalar>(space: &Arc<HomogeneousSpace>) -> Result<Vec<(String, HModule<S>)>> {
    let (r, f, m) = dihedral_generators(space).ok_or_else(|| Error::Unsupported("stabilizer is not dihedral".into()))?;
    let one = |v: i64| Matrix::scalar(S::from_i64(v));
    let mut out = Vec::new();
    let mut push = |name: String, dim: usize, rm: Matrix<S>, fm: Matrix<S>| -> Result<()> {
        out.push((name, HModule::from_generators(space.clone(), dim, vec![(r, rm), (f, fm)])?));
        Ok(())
    };
    push("trivial".into(), 1, one(1), one(1))?;
    push("sign".into(), 1, one(1), one(-1))?;
    if m % 2 == 0 {
        push("alt_r".into(), 1, one(-1), one(1))?;
        push("alt_rf".into(), 1, one(-1), one(-1))?;
    }
    for k in 1..=(m.saturating_sub(1)) / 2 {
        let t = S::two_cos(k as i64, m as i64).ok_or(Error::CharacterBackendMismatch { backend: S::NAME })?;
        let rm = Matrix::from_rows(vec![vec![S::zero(), S::one()], vec![-S::one(), t]]);
        let fm = Matrix::from_rows(vec![vec![S::zero(), S::one()], vec![S::one(), S::zero()]]);
        push(format!("rho{k}"), 2, rm, fm)?;
    }
    Ok(out)
}

fn dihedral_generators(space: &HomogeneousSpace) -> Option<(ElementId, ElementId, usize)> {
    let order = space.stabilizer().order();
    if order < 4 || !order.is_multiple_of(2) {
        return None;
    }
    let m = order / 2;
    let group = space.group();
    let elems = space.stabilizer().elements();
    for &r in elems.iter().filter(|&&r| group.element_order(r) == m) {
        let powers: Vec<ElementId> = std::iter::successors(Some(0), |&p| Some(group.mul(p, r))).take(m).collect();
        for &f in elems {
            if group.element_order(f) == 2 && !powers.contains(&f) && group.mul(group.mul(f, r), f) == group.inv(r) {
                return Some((r, f, m));
            }
        }
    }
    None
}

/// Built-in irreducibles: trivial stabilizer, cyclic, or dihedral.
pub fn builtin_irreps<S: Scalar>(space: &Arc<HomogeneousSpace>) -> Result<Vec<(String, HModule<S>)>> {
    let order = space.stabilizer().order();
    if order == 1 {
        return Ok(vec![("trivial".into(), HModule::trivial(space.clone()))]);
    }
    if find_generator(space, order).is_some() {
        return cyclic_irreps(space);
    }
    if dihedral_generators(space).is_some() {
        return dihedral_irreps(space);
    }
    Err(Error::Unsupported(format!("no built-in irreducibles for a stabilizer of order {order}")))
}
