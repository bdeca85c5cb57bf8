//! Dense row-major matrices over a [`Scalar`] field and the elimination
//! routines the rest of the crate is built on.
//!
//! Rank decisions use a relative threshold: during elimination a candidate
//! pivot is rejected when its magnitude is at most `tol * max|A|`. For exact
//! fields the threshold is ignored and only literal zeros are rejected.

use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Neg, Sub};

use crate::scalar::Scalar;

#[derive(Clone, PartialEq)]
pub struct Matrix<S> {
    rows: usize,
    cols: usize,
    data: Vec<S>,
}

impl<S: fmt::Debug> fmt::Debug for Matrix<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<&[S]> = self.data.chunks(self.cols.max(1)).take(self.rows).collect();
        f.debug_struct("Matrix").field("rows", &rows).finish()
    }
}

impl<S> Index<(usize, usize)> for Matrix<S> {
    type Output = S;

    fn index(&self, (r, c): (usize, usize)) -> &S {
        debug_assert!(r < self.rows && c < self.cols);
        &self.data[r * self.cols + c]
    }
}

impl<S> IndexMut<(usize, usize)> for Matrix<S> {
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut S {
        debug_assert!(r < self.rows && c < self.cols);
        &mut self.data[r * self.cols + c]
    }
}

/// Result of reduced row echelon elimination.
#[derive(Clone, Debug)]
pub struct Echelon<S> {
    pub reduced: Matrix<S>,
    pub pivots: Vec<usize>,
}

impl<S: Scalar> Matrix<S> {
    pub fn new(rows: usize, cols: usize, data: Vec<S>) -> Self {
        assert_eq!(data.len(), rows * cols, "matrix data length mismatch");
        Self { rows, cols, data }
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![S::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = S::one();
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> S) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                data.push(f(r, c));
            }
        }
        Self { rows, cols, data }
    }

    /// Panics on ragged input.
    pub fn from_rows(rows: Vec<Vec<S>>) -> Self {
        let n = rows.len();
        let m = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|r| r.len() == m), "ragged rows");
        Self { rows: n, cols: m, data: rows.into_iter().flatten().collect() }
    }

    pub fn scalar(value: S) -> Self {
        Self { rows: 1, cols: 1, data: vec![value] }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn row(&self, r: usize) -> &[S] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn entries(&self) -> &[S] {
        &self.data
    }

    pub fn to_rows(&self) -> Vec<Vec<S>> {
        (0..self.rows).map(|r| self.row(r).to_vec()).collect()
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |r, c| self[(c, r)].clone())
    }

    pub fn scale(&self, k: &S) -> Self {
        Self { rows: self.rows, cols: self.cols, data: self.data.iter().map(|x| x.clone() * k.clone()).collect() }
    }

    pub fn map(&self, f: impl Fn(&S) -> S) -> Self {
        Self { rows: self.rows, cols: self.cols, data: self.data.iter().map(f).collect() }
    }

    pub fn trace(&self) -> S {
        (0..self.rows.min(self.cols)).fold(S::zero(), |acc, i| acc + self[(i, i)].clone())
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(Scalar::magnitude).fold(0.0, f64::max)
    }

    pub fn is_zero_within(&self, eps: f64) -> bool {
        self.data.iter().all(|x| x.is_negligible(eps))
    }

    /// Entrywise comparison; relative to the larger of the two norms on
    /// inexact fields.
    pub fn approx_eq(&self, other: &Self, eps: f64) -> bool {
        if self.rows != other.rows || self.cols != other.cols {
            return false;
        }
        if S::EXACT {
            return self == other;
        }
        let scale = 1.0 + self.max_abs().max(other.max_abs());
        self.data
            .iter()
            .zip(&other.data)
            .all(|(a, b)| (a.clone() - b.clone()).magnitude() <= eps * scale)
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a.clone() - b.clone()).magnitude())
            .fold(0.0, f64::max)
    }

    /// Kronecker product; row index `(i, j) -> i * other.rows + j`.
    pub fn kron(&self, other: &Self) -> Self {
        Self::from_fn(self.rows * other.rows, self.cols * other.cols, |r, c| {
            let (i, j) = (r / other.rows, r % other.rows);
            let (k, l) = (c / other.cols, c % other.cols);
            self[(i, k)].clone() * other[(j, l)].clone()
        })
    }

    /// Block diagonal sum.
    pub fn direct_sum(&self, other: &Self) -> Self {
        let mut m = Self::zeros(self.rows + other.rows, self.cols + other.cols);
        for r in 0..self.rows {
            for c in 0..self.cols {
                m[(r, c)] = self[(r, c)].clone();
            }
        }
        for r in 0..other.rows {
            for c in 0..other.cols {
                m[(self.rows + r, self.cols + c)] = other[(r, c)].clone();
            }
        }
        m
    }

    /// Stack `other` below `self`.
    pub fn vstack(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.cols, "vstack column mismatch");
        let mut data = self.data.clone();
        data.extend(other.data.iter().cloned());
        Self { rows: self.rows + other.rows, cols: self.cols, data }
    }

    pub fn select_rows(&self, rows: &[usize]) -> Self {
        Self::from_fn(rows.len(), self.cols, |r, c| self[(rows[r], c)].clone())
    }

    pub fn select_cols(&self, cols: &[usize]) -> Self {
        Self::from_fn(self.rows, cols.len(), |r, c| self[(r, cols[c])].clone())
    }

    pub fn pow(&self, k: usize) -> Self {
        assert!(self.is_square());
        let mut out = Self::identity(self.rows);
        for _ in 0..k {
            out = &out * self;
        }
        out
    }

    /// Reduced row echelon form with partial pivoting by magnitude.
    pub fn echelon(&self, tol: f64) -> Echelon<S> {
        let mut a = self.clone();
        let threshold = if S::EXACT { 0.0 } else { tol * a.max_abs() };
        let mut pivots = Vec::new();
        let mut row = 0;
        for col in 0..a.cols {
            if row == a.rows {
                break;
            }
            let mut best = None;
            let mut best_mag = threshold;
            for r in row..a.rows {
                let x = &a[(r, col)];
                if x.is_zero() {
                    continue;
                }
                let mag = x.magnitude();
                if S::EXACT {
                    // Any nonzero entry is a valid pivot; prefer the first.
                    best = Some(r);
                    break;
                }
                if mag > best_mag {
                    best_mag = mag;
                    best = Some(r);
                }
            }
            let Some(p) = best else {
                if !S::EXACT {
                    for r in row..a.rows {
                        a[(r, col)] = S::zero();
                    }
                }
                continue;
            };
            a.swap_rows(row, p);
            let inv = S::one() / a[(row, col)].clone();
            let support: Vec<usize> = (col..a.cols).filter(|&c| !a[(row, c)].is_zero()).collect();
            for &c in &support {
                a[(row, c)] = a[(row, c)].clone() * inv.clone();
            }
            for r in 0..a.rows {
                if r == row || a[(r, col)].is_zero() {
                    continue;
                }
                let factor = a[(r, col)].clone();
                for &c in &support {
                    let v = a[(row, c)].clone() * factor.clone();
                    a[(r, c)] = a[(r, c)].clone() - v;
                }
                if !S::EXACT {
                    a[(r, col)] = S::zero();
                }
            }
            pivots.push(col);
            row += 1;
        }
        Echelon { reduced: a, pivots }
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for c in 0..self.cols {
            self.data.swap(a * self.cols + c, b * self.cols + c);
        }
    }

    pub fn rank(&self, tol: f64) -> usize {
        self.echelon(tol).pivots.len()
    }

    /// Basis of `{x : A x = 0}` as columns of the returned `cols x k` matrix.
    pub fn nullspace(&self, tol: f64) -> Matrix<S> {
        let Echelon { reduced, pivots } = self.echelon(tol);
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        let mut basis = Matrix::zeros(self.cols, free.len());
        for (k, &f) in free.iter().enumerate() {
            basis[(f, k)] = S::one();
            for (r, &p) in pivots.iter().enumerate() {
                basis[(p, k)] = -reduced[(r, f)].clone();
            }
        }
        basis
    }

    /// Basis of `{v : v A = 0}` as rows.
    pub fn left_nullspace(&self, tol: f64) -> Matrix<S> {
        self.transpose().nullspace(tol).transpose()
    }

    /// Basis of the row space as rows (reduced echelon rows).
    pub fn row_space(&self, tol: f64) -> Matrix<S> {
        let Echelon { reduced, pivots } = self.echelon(tol);
        let keep: Vec<usize> = (0..pivots.len()).collect();
        reduced.select_rows(&keep)
    }

    pub fn det(&self) -> S {
        assert!(self.is_square(), "determinant of a non-square matrix");
        let n = self.rows;
        let mut a = self.clone();
        let mut det = S::one();
        for col in 0..n {
            let mut best = None;
            let mut best_mag = 0.0;
            for r in col..n {
                let x = &a[(r, col)];
                if x.is_zero() {
                    continue;
                }
                let mag = x.magnitude();
                if best.is_none() || (!S::EXACT && mag > best_mag) {
                    best = Some(r);
                    best_mag = mag;
                }
            }
            let Some(p) = best else {
                return S::zero();
            };
            if p != col {
                a.swap_rows(p, col);
                det = -det;
            }
            let pivot = a[(col, col)].clone();
            det = det * pivot.clone();
            for r in col + 1..n {
                if a[(r, col)].is_zero() {
                    continue;
                }
                let factor = a[(r, col)].clone() / pivot.clone();
                for c in col..n {
                    let v = a[(col, c)].clone() * factor.clone();
                    a[(r, c)] = a[(r, c)].clone() - v;
                }
            }
        }
        det
    }

    /// Inverse by Gauss–Jordan; `None` when the matrix is singular at `tol`.
    pub fn inverse(&self, tol: f64) -> Option<Matrix<S>> {
        assert!(self.is_square(), "inverse of a non-square matrix");
        let n = self.rows;
        let mut aug = Matrix::zeros(n, 2 * n);
        for r in 0..n {
            for c in 0..n {
                aug[(r, c)] = self[(r, c)].clone();
            }
            aug[(r, n + r)] = S::one();
        }
        let Echelon { reduced, pivots } = aug.echelon(tol);
        if pivots.len() < n || pivots[n - 1] != n - 1 {
            return None;
        }
        let cols: Vec<usize> = (n..2 * n).collect();
        Some(reduced.select_cols(&cols))
    }

    /// Solve `X A = B` for `X` when the rows of `A` are independent and the
    /// rows of `B` lie in their span. Returns `None` otherwise.
    pub fn solve_left(a: &Matrix<S>, b: &Matrix<S>, tol: f64) -> Option<Matrix<S>> {
        assert_eq!(a.cols, b.cols);
        let pivots = a.echelon(tol).pivots;
        if pivots.len() < a.rows {
            return None;
        }
        let square = a.select_cols(&pivots);
        let inv = square.inverse(tol)?;
        let x = &b.select_cols(&pivots) * &inv;
        let eps = if S::EXACT { 0.0 } else { tol.max(1e-12) };
        (&x * a).approx_eq(b, eps.sqrt().max(eps)).then_some(x)
    }

    /// Rows of the identity that extend the independent rows of `basis` to a
    /// basis of the whole space.
    pub fn complement_rows(basis: &Matrix<S>, dim: usize, tol: f64) -> Matrix<S> {
        let mut current = basis.clone();
        let mut chosen = Vec::new();
        let base_rank = if basis.rows == 0 { 0 } else { basis.rank(tol) };
        let mut rank = base_rank;
        for i in 0..dim {
            let mut e = Matrix::zeros(1, dim);
            e[(0, i)] = S::one();
            let trial = if current.rows == 0 { e.clone() } else { current.vstack(&e) };
            let r = trial.rank(tol);
            if r > rank {
                rank = r;
                current = trial;
                chosen.push(i);
            }
        }
        Matrix::from_fn(chosen.len(), dim, |r, c| if c == chosen[r] { S::one() } else { S::zero() })
    }
}

impl<S: Scalar> Mul for &Matrix<S> {
    type Output = Matrix<S>;

    fn mul(self, rhs: &Matrix<S>) -> Matrix<S> {
        assert_eq!(self.cols, rhs.rows, "matrix product shape mismatch");
        let mut out = Matrix::<S>::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..rhs.cols {
                    if rhs[(k, j)].is_zero() {
                        continue;
                    }
                    let v = a.clone() * rhs[(k, j)].clone();
                    out[(i, j)] = out[(i, j)].clone() + v;
                }
            }
        }
        out
    }
}

impl<S: Scalar> Mul for Matrix<S> {
    type Output = Matrix<S>;

    fn mul(self, rhs: Matrix<S>) -> Matrix<S> {
        &self * &rhs
    }
}

impl<S: Scalar> Add for Matrix<S> {
    type Output = Matrix<S>;

    fn add(self, rhs: Matrix<S>) -> Matrix<S> {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols), "matrix sum shape mismatch");
        let data = self.data.into_iter().zip(rhs.data).map(|(a, b)| a + b).collect();
        Matrix { rows: self.rows, cols: self.cols, data }
    }
}

impl<S: Scalar> Sub for Matrix<S> {
    type Output = Matrix<S>;

    fn sub(self, rhs: Matrix<S>) -> Matrix<S> {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols), "matrix difference shape mismatch");
        let data = self.data.into_iter().zip(rhs.data).map(|(a, b)| a - b).collect();
        Matrix { rows: self.rows, cols: self.cols, data }
    }
}

impl<S: Scalar> Neg for Matrix<S> {
    type Output = Matrix<S>;

    fn neg(self) -> Matrix<S> {
        Matrix { rows: self.rows, cols: self.cols, data: self.data.into_iter().map(|x| -x).collect() }
    }
}
