//! GF-difference equations presented by connection matrices.
//!
//! An equation of rank `n` is the free `k`-module with basis `e_1..e_n` and
//! the `G`-action `g e_i = Σ_j E^g_{ij} e_j`. Coordinates are row vectors:
//! an element `Σ f_i e_i` is moved by `(g·v)_j(y) = Σ_i f_i(g⁻¹y) E^g_{ij}(y)`.
//! Consistency of the action is the cocycle law
//! `E^{gg'}(y) = E^{g'}(g⁻¹y) E^g(y)`.

use std::collections::VecDeque;
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::group::{ElementId, HomogeneousSpace};
use crate::linalg::Matrix;
use crate::scalar::Scalar;
use crate::skew::{Function, SkewOp};

/// Per-element, per-point connection matrices `E^g(y)`.
#[derive(Clone, Debug, PartialEq)]
pub struct Connection<S> {
    rank: usize,
    matrices: Vec<Vec<Matrix<S>>>,
}

impl<S: Scalar> Connection<S> {
    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn at(&self, g: ElementId, y: usize) -> &Matrix<S> {
        &self.matrices[g][y]
    }

    /// `E^g` as an `n x n` matrix of functions, entry `(i, j)`.
    pub fn entry(&self, g: ElementId, i: usize, j: usize) -> Function<S> {
        Function::new(self.matrices[g].iter().map(|m| m[(i, j)].clone()).collect())
    }
}

struct Inner<S> {
    space: Arc<HomogeneousSpace>,
    connection: Connection<S>,
}

/// A validated equation; cheap to clone.
#[derive(Clone)]
pub struct Equation<S> {
    inner: Arc<Inner<S>>,
}

impl<S> fmt::Debug for Equation<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Equation")
            .field("rank", &self.inner.connection.rank)
            .field("points", &self.inner.space.size())
            .finish()
    }
}

impl<S: Scalar> PartialEq for Equation<S> {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.inner.space, &other.inner.space) && self.inner.connection == other.inner.connection
    }
}

/// An element of an equation: `n` coordinate functions.
#[derive(Clone, Debug, PartialEq)]
pub struct ModuleElement<S> {
    coords: Vec<Function<S>>,
}

impl<S: Scalar> ModuleElement<S> {
    pub fn new(coords: Vec<Function<S>>) -> Self {
        Self { coords }
    }

    pub fn coords(&self) -> &[Function<S>] {
        &self.coords
    }

    pub fn rank(&self) -> usize {
        self.coords.len()
    }

    /// The coordinate row at point `y`.
    pub fn row_at(&self, y: usize) -> Matrix<S> {
        Matrix::from_fn(1, self.coords.len(), |_, i| self.coords[i].at(y).clone())
    }

    /// Build from per-point coordinate rows.
    pub fn from_rows(rows: &[Matrix<S>]) -> Self {
        let n = rows.first().map_or(0, Matrix::cols);
        Self { coords: (0..n).map(|i| Function::new(rows.iter().map(|r| r[(0, i)].clone()).collect())).collect() }
    }

    /// Flattened coordinates, index `i * |S| + y`.
    pub fn to_vector(&self) -> Vec<S> {
        self.coords.iter().flat_map(|f| f.values().iter().cloned()).collect()
    }

    pub fn from_vector(rank: usize, points: usize, v: &[S]) -> Self {
        assert_eq!(v.len(), rank * points);
        Self { coords: (0..rank).map(|i| Function::new(v[i * points..(i + 1) * points].to_vec())).collect() }
    }

    pub fn approx_eq(&self, other: &Self, eps: f64) -> bool {
        self.coords.len() == other.coords.len() && self.coords.iter().zip(&other.coords).all(|(a, b)| a.approx_eq(b, eps))
    }
}

impl<S: Scalar> Equation<S> {
    /// Validate a full connection table `matrices[g][y]`.
    pub fn from_connection(space: Arc<HomogeneousSpace>, rank: usize, matrices: Vec<Vec<Matrix<S>>>) -> Result<Self> {
        let group = space.group();
        if matrices.len() != group.order() || matrices.iter().any(|per| per.len() != space.size()) {
            return Err(Error::ShapeMismatch("connection table must be indexed by every element and point".into()));
        }
        if matrices.iter().flatten().any(|m| m.rows() != rank || m.cols() != rank) {
            return Err(Error::ShapeMismatch(format!("connection matrices must be {rank}x{rank}")));
        }
        let eq = Self { inner: Arc::new(Inner { space, connection: Connection { rank, matrices } }) };
        eq.validate()?;
        Ok(eq)
    }

    /// Extend matrices given on generators to all of `G` via the cocycle law,
    /// checking every generator × element pair on the way.
    pub fn complete_connection(
        space: Arc<HomogeneousSpace>,
        rank: usize,
        generators: Vec<(ElementId, Vec<Matrix<S>>)>,
    ) -> Result<Self> {
        let group = space.group();
        let n_points = space.size();
        let tol = space.tolerance();
        for (g, per_point) in &generators {
            if per_point.len() != n_points || per_point.iter().any(|m| m.rows() != rank || m.cols() != rank) {
                return Err(Error::ShapeMismatch(format!("generator {g} needs {n_points} matrices of size {rank}x{rank}")));
            }
            for (y, m) in per_point.iter().enumerate() {
                if rank > 0 && m.det().is_negligible(tol.eps) {
                    return Err(Error::SingularGeneratorMatrix { generator: generator_name(&space, *g), point: y });
                }
            }
        }

        let mut table: Vec<Option<Vec<Matrix<S>>>> = vec![None; group.order()];
        table[0] = Some(vec![Matrix::identity(rank); n_points]);
        let mut queue = VecDeque::from([0usize]);
        while let Some(h) = queue.pop_front() {
            let eh = table[h].clone().expect("queued elements are known");
            for (s, es) in &generators {
                // E^{sh}(y) = E^h(s⁻¹y) E^s(y)
                let sh = group.mul(*s, h);
                let candidate: Vec<Matrix<S>> =
                    (0..n_points).map(|y| &eh[group.act_inv(*s, y)] * &es[y]).collect();
                match &table[sh] {
                    Some(existing) => {
                        for y in 0..n_points {
                            if !existing[y].approx_eq(&candidate[y], tol.eps) {
                                return Err(Error::InconsistentConnection(format!(
                                    "element {sh} reached by two words with different matrices at point {y}"
                                )));
                            }
                        }
                    }
                    None => {
                        table[sh] = Some(candidate);
                        queue.push_back(sh);
                    }
                }
            }
        }
        if table.iter().any(Option::is_none) {
            return Err(Error::ShapeMismatch("generator data does not generate the whole group".into()));
        }
        let matrices = table.into_iter().map(|m| m.expect("checked")).collect();
        Self::from_connection(space, rank, matrices)
    }

    /// Same matrix at every point for each generator.
    pub fn from_constant_generators(space: Arc<HomogeneousSpace>, rank: usize, generators: Vec<(ElementId, Matrix<S>)>) -> Result<Self> {
        let n = space.size();
        let gens = generators.into_iter().map(|(g, m)| (g, vec![m; n])).collect();
        Self::complete_connection(space, rank, gens)
    }

    /// The trivial equation `𝟙 = k` with `E^g = 1`.
    pub fn trivial(space: Arc<HomogeneousSpace>) -> Self {
        Self::trivial_power(space, 1)
    }

    /// `𝟙ⁿ`: identity connection of rank `n`.
    pub fn trivial_power(space: Arc<HomogeneousSpace>, n: usize) -> Self {
        let matrices = vec![vec![Matrix::identity(n); space.size()]; space.group().order()];
        Self { inner: Arc::new(Inner { space, connection: Connection { rank: n, matrices } }) }
    }

    /// A rank-one equation from a homomorphism `χ: G -> F^×`, `E^g = χ(g)`.
    pub fn from_character(space: Arc<HomogeneousSpace>, chi: impl Fn(ElementId) -> S) -> Result<Self> {
        let n = space.size();
        let matrices = space.group().elements().map(|g| vec![Matrix::scalar(chi(g)); n]).collect();
        Self::from_connection(space, 1, matrices)
    }

    /// The rank-one equation of the permutation sign of `G`.
    pub fn sign(space: Arc<HomogeneousSpace>) -> Result<Self> {
        let group = space.group().clone();
        Self::from_character(space, |g| S::from_i64(group.parity(g)))
    }

    pub fn space(&self) -> &Arc<HomogeneousSpace> {
        &self.inner.space
    }

    pub fn connection(&self) -> &Connection<S> {
        &self.inner.connection
    }

    pub fn rank(&self) -> usize {
        self.inner.connection.rank
    }

    /// `E^g(y)`.
    pub fn at(&self, g: ElementId, y: usize) -> &Matrix<S> {
        self.inner.connection.at(g, y)
    }

    pub fn same_space(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.inner.space, &other.inner.space)
    }

    pub(crate) fn require_same_space_as(&self, space: &Arc<HomogeneousSpace>) -> Result<()> {
        if Arc::ptr_eq(&self.inner.space, space) {
            Ok(())
        } else {
            Err(Error::SpaceMismatch)
        }
    }

    pub(crate) fn require_same_space(&self, other: &Self) -> Result<()> {
        if self.same_space(other) {
            Ok(())
        } else {
            Err(Error::SpaceMismatch)
        }
    }

    /// Check identity, cocycle and inverse laws and pointwise invertibility.
    /// The cocycle law is checked on all pairs when `|G|` is at most the
    /// space's cocycle cap, otherwise on generators × all elements.
    pub fn validate(&self) -> Result<()> {
        let space = self.space();
        let group = space.group();
        let n = self.rank();
        let eps = space.tolerance().eps;
        let points = space.size();
        for y in 0..points {
            if !self.at(0, y).approx_eq(&Matrix::identity(n), eps) {
                return Err(Error::InconsistentConnection(format!("E^e is not the identity at point {y}")));
            }
        }
        let exhaustive = group.order() <= space.cocycle_cap();
        let left: Vec<ElementId> = if exhaustive { group.elements().collect() } else { group.generator_ids() };
        for &g in &left {
            for h in group.elements() {
                let gh = group.mul(g, h);
                for y in 0..points {
                    let rhs = self.at(h, group.act_inv(g, y)) * self.at(g, y);
                    if !self.at(gh, y).approx_eq(&rhs, eps) {
                        return Err(Error::InconsistentConnection(format!(
                            "E^(gh) != g(E^h) E^g for g={g}, h={h} at point {y}"
                        )));
                    }
                }
            }
        }
        if exhaustive {
            // E^{g⁻¹}(g⁻¹y) E^g(y) = E^e(y) = I is one of the pairs checked,
            // so invertibility and the inverse law already hold.
            return Ok(());
        }
        for g in group.elements() {
            let gi = group.inv(g);
            for y in 0..points {
                let m = self.at(g, y);
                if n > 0 && m.det().is_negligible(eps) {
                    return Err(Error::InconsistentConnection(format!("E^{g} is singular at point {y}")));
                }
                // (E^g)^{-1}(y) = E^{g⁻¹}(g⁻¹y)
                let inv = self.at(gi, group.act_inv(g, y));
                if !(m * inv).approx_eq(&Matrix::identity(n), eps) {
                    return Err(Error::InconsistentConnection(format!("inverse law fails for element {g} at point {y}")));
                }
            }
        }
        Ok(())
    }

    /// `g · v` in row-vector coordinates.
    pub fn act(&self, g: ElementId, v: &ModuleElement<S>) -> ModuleElement<S> {
        assert_eq!(v.rank(), self.rank(), "module element rank mismatch");
        let group = self.space().group();
        let rows: Vec<Matrix<S>> =
            (0..self.space().size()).map(|y| &v.row_at(group.act_inv(g, y)) * self.at(g, y)).collect();
        if rows.is_empty() || self.rank() == 0 {
            return ModuleElement::new(vec![Function::zero(self.space().size()); self.rank()]);
        }
        ModuleElement::from_rows(&rows)
    }

    /// Action of a skew-algebra element: `(Σ a_g g) v = Σ a_g (g·v)`.
    pub fn apply(&self, a: &SkewOp<S>, v: &ModuleElement<S>) -> ModuleElement<S> {
        let n = self.space().size();
        let mut out = vec![Function::zero(n); self.rank()];
        for (&g, coeff) in a.terms() {
            let moved = self.act(g, v);
            for (o, m) in out.iter_mut().zip(moved.coords()) {
                *o = &*o + &(coeff * m);
            }
        }
        ModuleElement::new(out)
    }

    fn map_pointwise(&self, rank: usize, f: impl Fn(&Matrix<S>) -> Matrix<S>) -> Result<Self> {
        let matrices = self.inner.connection.matrices.iter().map(|per| per.iter().map(&f).collect()).collect();
        Self::from_connection(self.space().clone(), rank, matrices)
    }

    fn zip_pointwise(&self, other: &Self, rank: usize, f: impl Fn(&Matrix<S>, &Matrix<S>) -> Matrix<S>) -> Result<Self> {
        self.require_same_space(other)?;
        let matrices = self
            .inner
            .connection
            .matrices
            .iter()
            .zip(&other.inner.connection.matrices)
            .map(|(a, b)| a.iter().zip(b).map(|(x, y)| f(x, y)).collect())
            .collect();
        Self::from_connection(self.space().clone(), rank, matrices)
    }

    /// `(E ⊕ F)^g = E^g ⊕ F^g`.
    pub fn direct_sum(&self, other: &Self) -> Result<Self> {
        self.zip_pointwise(other, self.rank() + other.rank(), |a, b| a.direct_sum(b))
    }

    /// `(E ⊗ F)^g = E^g ⊗ F^g`, basis `e_i ⊗ f_j` at index `i * m + j`.
    pub fn tensor(&self, other: &Self) -> Result<Self> {
        self.zip_pointwise(other, self.rank() * other.rank(), |a, b| a.kron(b))
    }

    /// `Hom_k(E, F)^g = F^g ⊗ ((E^g)^t)^{-1}`; basis `δ_ij` (`e_j -> f_i`) at
    /// index `i * n + j`.
    pub fn hom(&self, target: &Self) -> Result<Self> {
        let tol = self.space().tolerance();
        let n = self.rank();
        target.zip_pointwise(self, target.rank() * n, |f, e| {
            let inv_t = e.inverse(tol.rank).expect("validated connections are invertible").transpose();
            f.kron(&inv_t)
        })
    }

    /// `(E^*)^g = ((E^g)^t)^{-1}`.
    pub fn dual(&self) -> Result<Self> {
        let tol = self.space().tolerance();
        self.map_pointwise(self.rank(), |m| m.inverse(tol.rank).expect("validated connections are invertible").transpose())
    }

    /// Symmetric square on the basis `e_i e_j`, `i <= j`.
    pub fn sym2(&self) -> Result<Self> {
        let n = self.rank();
        self.map_pointwise(n * (n + 1) / 2, sym2_matrix)
    }

    /// Exterior square on the basis `e_i ∧ e_j`, `i < j`.
    pub fn wedge2(&self) -> Result<Self> {
        let n = self.rank();
        self.map_pointwise(n * n.saturating_sub(1) / 2, wedge2_matrix)
    }

    /// Top exterior power: `det E^g`.
    pub fn wedge_top(&self) -> Result<Self> {
        self.map_pointwise(1, |m| Matrix::scalar(m.det()))
    }

    /// Change of basis `e'_i = Σ_j P_ij(y) e_j`; returns the new equation
    /// with `E'^g(y) = P(g⁻¹y) E^g(y) P(y)⁻¹`.
    pub fn gauge(&self, p: &[Matrix<S>]) -> Result<Self> {
        let space = self.space();
        let tol = space.tolerance();
        if p.len() != space.size() {
            return Err(Error::ShapeMismatch("gauge needs one matrix per point".into()));
        }
        let inverses = p
            .iter()
            .enumerate()
            .map(|(y, m)| m.inverse(tol.rank).ok_or(Error::SingularGeneratorMatrix { generator: "gauge".into(), point: y }))
            .collect::<Result<Vec<_>>>()?;
        let group = space.group();
        let matrices = group
            .elements()
            .map(|g| {
                (0..space.size())
                    .map(|y| &(&p[group.act_inv(g, y)] * self.at(g, y)) * &inverses[y])
                    .collect()
            })
            .collect();
        Self::from_connection(space.clone(), self.rank(), matrices)
    }
}

/// Matrix of the induced map on symmetric squares: row `(i <= j)`, column
/// `(k <= l)`, entry `M_ik M_jk` on the diagonal and `M_ik M_jl + M_il M_jk`
/// off it. Works for rectangular `M`.
pub fn sym2_matrix<S: Scalar>(m: &Matrix<S>) -> Matrix<S> {
    let rows = pairs(m.rows(), true);
    let cols = pairs(m.cols(), true);
    Matrix::from_fn(rows.len(), cols.len(), |r, c| {
        let (i, j) = rows[r];
        let (k, l) = cols[c];
        if k == l {
            m[(i, k)].clone() * m[(j, k)].clone()
        } else {
            m[(i, k)].clone() * m[(j, l)].clone() + m[(i, l)].clone() * m[(j, k)].clone()
        }
    })
}

/// Matrix of the induced map on exterior squares:
/// `M_ik M_jl - M_il M_jk` for `i < j`, `k < l`.
pub fn wedge2_matrix<S: Scalar>(m: &Matrix<S>) -> Matrix<S> {
    let rows = pairs(m.rows(), false);
    let cols = pairs(m.cols(), false);
    Matrix::from_fn(rows.len(), cols.len(), |r, c| {
        let (i, j) = rows[r];
        let (k, l) = cols[c];
        m[(i, k)].clone() * m[(j, l)].clone() - m[(i, l)].clone() * m[(j, k)].clone()
    })
}

/// Lexicographic index pairs `i <= j` (or `i < j`).
pub fn pairs(n: usize, diagonal: bool) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    for i in 0..n {
        for j in i..n {
            if diagonal || i < j {
                out.push((i, j));
            }
        }
    }
    out
}

fn generator_name(space: &HomogeneousSpace, g: ElementId) -> String {
    space
        .group()
        .generators()
        .iter()
        .find(|(_, id)| *id == g)
        .map(|(n, _)| n.clone())
        .unwrap_or_else(|| format!("element {g}"))
}
