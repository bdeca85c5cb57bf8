//! Functions on the space and the skew group algebra `A = F(S)[G]` of
//! G-difference operators.

use std::collections::BTreeMap;
use std::ops::{Add, Mul, Sub};
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::group::{ElementId, Group, HomogeneousSpace};
use crate::linalg::Matrix;
use crate::scalar::Scalar;

/// An element of `k = F(S)`: one scalar per point.
#[derive(Clone, Debug, PartialEq)]
pub struct Function<S> {
    values: Vec<S>,
}

impl<S: Scalar> Function<S> {
    pub fn new(values: Vec<S>) -> Self {
        Self { values }
    }

    pub fn constant(n: usize, value: S) -> Self {
        Self { values: vec![value; n] }
    }

    pub fn zero(n: usize) -> Self {
        Self::constant(n, S::zero())
    }

    pub fn one(n: usize) -> Self {
        Self::constant(n, S::one())
    }

    /// Indicator function of point `x`.
    pub fn delta(n: usize, x: usize) -> Self {
        let mut values = vec![S::zero(); n];
        values[x] = S::one();
        Self { values }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[S] {
        &self.values
    }

    pub fn at(&self, x: usize) -> &S {
        &self.values[x]
    }

    pub fn scale(&self, k: &S) -> Self {
        Self { values: self.values.iter().map(|v| v.clone() * k.clone()).collect() }
    }

    /// The lifted action `(g·f)(x) = f(g⁻¹x)`.
    pub fn act(&self, group: &Group, g: ElementId) -> Self {
        Self { values: (0..self.values.len()).map(|x| self.values[group.act_inv(g, x)].clone()).collect() }
    }

    pub fn is_zero_within(&self, eps: f64) -> bool {
        self.values.iter().all(|v| v.is_negligible(eps))
    }

    pub fn approx_eq(&self, other: &Self, eps: f64) -> bool {
        self.values.len() == other.values.len() && self.values.iter().zip(&other.values).all(|(a, b)| a.approx_eq(b, eps))
    }

    /// `max - min` spread test for constancy; relative on inexact fields.
    pub fn is_constant(&self, eps: f64) -> bool {
        match self.values.first() {
            None => true,
            Some(first) => self.values.iter().all(|v| v.approx_eq(first, eps)),
        }
    }
}

impl<S: Scalar> Add for &Function<S> {
    type Output = Function<S>;

    fn add(self, rhs: &Function<S>) -> Function<S> {
        assert_eq!(self.len(), rhs.len());
        Function { values: self.values.iter().zip(&rhs.values).map(|(a, b)| a.clone() + b.clone()).collect() }
    }
}

impl<S: Scalar> Sub for &Function<S> {
    type Output = Function<S>;

    fn sub(self, rhs: &Function<S>) -> Function<S> {
        assert_eq!(self.len(), rhs.len());
        Function { values: self.values.iter().zip(&rhs.values).map(|(a, b)| a.clone() - b.clone()).collect() }
    }
}

impl<S: Scalar> Mul for &Function<S> {
    type Output = Function<S>;

    fn mul(self, rhs: &Function<S>) -> Function<S> {
        assert_eq!(self.len(), rhs.len());
        Function { values: self.values.iter().zip(&rhs.values).map(|(a, b)| a.clone() * b.clone()).collect() }
    }
}

/// An element `Σ a_g g` of the skew group algebra; absent terms are zero.
#[derive(Clone, Debug)]
pub struct SkewOp<S> {
    space: Arc<HomogeneousSpace>,
    terms: BTreeMap<ElementId, Function<S>>,
}

impl<S: Scalar> PartialEq for SkewOp<S> {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.space, &other.space) && self.terms == other.terms
    }
}

impl<S: Scalar> SkewOp<S> {
    pub fn zero(space: Arc<HomogeneousSpace>) -> Self {
        Self { space, terms: BTreeMap::new() }
    }

    /// `f · g`.
    pub fn term(space: Arc<HomogeneousSpace>, f: Function<S>, g: ElementId) -> Self {
        let mut op = Self::zero(space);
        op.add_term(g, f);
        op
    }

    /// `1 · g`.
    pub fn element(space: Arc<HomogeneousSpace>, g: ElementId) -> Self {
        let n = space.size();
        Self::term(space, Function::one(n), g)
    }

    /// The embedding `k -> A`, `f -> f · e`.
    pub fn function(space: Arc<HomogeneousSpace>, f: Function<S>) -> Self {
        Self::term(space, f, 0)
    }

    pub fn from_terms(space: Arc<HomogeneousSpace>, terms: impl IntoIterator<Item = (ElementId, Function<S>)>) -> Self {
        let mut op = Self::zero(space);
        for (g, f) in terms {
            op.add_term(g, f);
        }
        op
    }

    pub fn space(&self) -> &Arc<HomogeneousSpace> {
        &self.space
    }

    pub fn terms(&self) -> &BTreeMap<ElementId, Function<S>> {
        &self.terms
    }

    pub fn coefficient(&self, g: ElementId) -> Function<S> {
        self.terms.get(&g).cloned().unwrap_or_else(|| Function::zero(self.space.size()))
    }

    fn add_term(&mut self, g: ElementId, f: Function<S>) {
        let eps = self.space.tolerance().eps;
        let sum = match self.terms.remove(&g) {
            Some(old) => &old + &f,
            None => f,
        };
        if !sum.is_zero_within(eps) {
            self.terms.insert(g, sum);
        }
    }

    fn check_space(&self, other: &Self) -> Result<()> {
        if Arc::ptr_eq(&self.space, &other.space) {
            Ok(())
        } else {
            Err(Error::SpaceMismatch)
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_space(other)?;
        let mut out = self.clone();
        for (&g, f) in &other.terms {
            out.add_term(g, f.clone());
        }
        Ok(out)
    }

    pub fn scale(&self, k: &S) -> Self {
        Self::from_terms(self.space.clone(), self.terms.iter().map(|(&g, f)| (g, f.scale(k))))
    }

    /// The twisted product `(f g)(h g') = (f · g(h)) gg'`, extended bilinearly.
    pub fn skew_mul(&self, other: &Self) -> Result<Self> {
        self.check_space(other)?;
        let group = self.space.group();
        let mut out = Self::zero(self.space.clone());
        for (&g, f) in &self.terms {
            for (&g2, h) in &other.terms {
                out.add_term(group.mul(g, g2), f * &h.act(group, g));
            }
        }
        Ok(out)
    }

    /// `(Σ a_g g) f = Σ a_g · g(f)`.
    pub fn apply(&self, f: &Function<S>) -> Function<S> {
        let group = self.space.group();
        let mut out = Function::zero(self.space.size());
        for (&g, a) in &self.terms {
            out = &out + &(a * &f.act(group, g));
        }
        out
    }

    /// Matrix of [`apply`](Self::apply) on the basis of point indicators,
    /// column convention: `out = M · values`.
    pub fn action_matrix(&self) -> Matrix<S> {
        let n = self.space.size();
        let group = self.space.group();
        let mut m = Matrix::<S>::zeros(n, n);
        for (&g, a) in &self.terms {
            for y in 0..n {
                let src = group.act_inv(g, y);
                m[(y, src)] = m[(y, src)].clone() + a.at(y).clone();
            }
        }
        m
    }
}
