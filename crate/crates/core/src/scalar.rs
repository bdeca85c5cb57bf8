//! Field abstraction shared by every algorithm in the crate.
//!
//! Two families of fields are supported: exact rationals, where zero tests are
//! literal, and floating point (real or complex), where a value is treated as
//! zero when its magnitude falls under a caller-supplied tolerance.

use std::fmt::Debug;
use std::ops::Neg;

use nalgebra::DMatrix;
use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{Num, Signed, ToPrimitive, Zero};
use rand::Rng;

use crate::linalg::Matrix;

/// A field element usable as a coefficient of functions on the space.
pub trait Scalar: Num + Neg<Output = Self> + Clone + Debug + PartialEq + Send + Sync + 'static {
    /// `true` when arithmetic is exact and zero tests need no tolerance.
    const EXACT: bool;
    /// Short backend name used in reports.
    const NAME: &'static str;
    /// Every polynomial over the field splits (eigenvalues always exist).
    const ALGEBRAICALLY_CLOSED: bool;

    fn from_i64(v: i64) -> Self;

    fn from_ratio(num: i64, den: i64) -> Self;

    /// Absolute value as a float, used for pivot selection and norms.
    fn magnitude(&self) -> f64;

    fn to_complex(&self) -> Complex64;

    /// Complex conjugate (identity on real fields).
    fn conj(&self) -> Self;

    /// `exp(2πi k/n)` if it lies in the field.
    fn root_of_unity(k: i64, n: i64) -> Option<Self>;

    /// `2 cos(2π k/n)` if it lies in the field.
    fn two_cos(k: i64, n: i64) -> Option<Self>;

    /// Eigenvalues of a square matrix that lie in the field, without
    /// multiplicity. Exact fields only report values they can certify.
    fn eigenvalues(m: &Matrix<Self>, eps: f64) -> Vec<Self>;

    /// A small random element, used for generic linear combinations.
    fn sample<R: Rng + ?Sized>(rng: &mut R) -> Self;

    /// Zero test: literal for exact fields, `|x| <= eps` otherwise.
    fn is_negligible(&self, eps: f64) -> bool {
        if Self::EXACT {
            self.is_zero()
        } else {
            self.magnitude() <= eps
        }
    }

    /// Equality test: literal for exact fields, relative otherwise.
    fn approx_eq(&self, other: &Self, eps: f64) -> bool {
        if Self::EXACT {
            self == other
        } else {
            let scale = 1.0 + self.magnitude().max(other.magnitude());
            (self.clone() - other.clone()).magnitude() <= eps * scale
        }
    }
}

fn reduced_turn(k: i64, n: i64) -> (i64, i64) {
    assert!(n > 0, "root of unity order must be positive");
    let k = k.rem_euclid(n);
    let g = k.gcd(&n).max(1);
    (k / g, n / g)
}

/// `2cos(2πk/n)` is rational exactly when the reduced order is 1, 2, 3, 4 or 6.
fn rational_two_cos(k: i64, n: i64) -> Option<(i64, i64)> {
    match reduced_turn(k, n) {
        (0, _) => Some((2, 1)),
        (1, 2) => Some((-2, 1)),
        (_, 3) => Some((-1, 1)),
        (_, 4) => Some((0, 1)),
        (_, 6) => Some((1, 1)),
        _ => None,
    }
}

fn rational_root_of_unity(k: i64, n: i64) -> Option<i64> {
    match reduced_turn(k, n) {
        (0, _) => Some(1),
        (1, 2) => Some(-1),
        _ => None,
    }
}

fn to_dmatrix_f64(m: &Matrix<impl Scalar>) -> DMatrix<f64> {
    DMatrix::from_fn(m.rows(), m.cols(), |r, c| m[(r, c)].to_complex().re)
}

impl Scalar for BigRational {
    const EXACT: bool = true;
    const NAME: &'static str = "rational";
    const ALGEBRAICALLY_CLOSED: bool = false;

    fn from_i64(v: i64) -> Self {
        BigRational::from_integer(BigInt::from(v))
    }

    fn from_ratio(num: i64, den: i64) -> Self {
        BigRational::new(BigInt::from(num), BigInt::from(den))
    }

    fn magnitude(&self) -> f64 {
        self.abs().to_f64().unwrap_or(f64::INFINITY)
    }

    fn to_complex(&self) -> Complex64 {
        Complex64::new(self.to_f64().unwrap_or(f64::NAN), 0.0)
    }

    fn conj(&self) -> Self {
        self.clone()
    }

    fn root_of_unity(k: i64, n: i64) -> Option<Self> {
        rational_root_of_unity(k, n).map(Self::from_i64)
    }

    fn two_cos(k: i64, n: i64) -> Option<Self> {
        rational_two_cos(k, n).map(|(p, q)| Self::from_ratio(p, q))
    }

    fn eigenvalues(m: &Matrix<Self>, _eps: f64) -> Vec<Self> {
        // Approximate numerically, rationalize, then certify with an exact
        // singularity test.
        if m.rows() == 0 {
            return Vec::new();
        }
        let approx = to_dmatrix_f64(m).complex_eigenvalues();
        let mut found: Vec<Self> = Vec::new();
        for z in approx.iter() {
            if z.im.abs() > 1e-6 * (1.0 + z.re.abs()) {
                continue;
            }
            let Some(candidate) = rationalize(z.re, 1_000_000) else {
                continue;
            };
            if found.contains(&candidate) {
                continue;
            }
            let shifted = m.clone() - Matrix::identity(m.rows()).scale(&candidate);
            if shifted.det().is_zero() {
                found.push(candidate);
            }
        }
        found
    }

    fn sample<R: Rng + ?Sized>(rng: &mut R) -> Self {
        Self::from_i64(rng.gen_range(-5..=5))
    }
}

/// Best rational approximation with denominator at most `max_den`
/// (continued fractions).
fn rationalize(x: f64, max_den: i64) -> Option<BigRational> {
    if !x.is_finite() {
        return None;
    }
    let (mut h0, mut h1) = (0i128, 1i128);
    let (mut k0, mut k1) = (1i128, 0i128);
    let mut value = x;
    for _ in 0..64 {
        let a = value.floor();
        if a.abs() > 1e15 {
            break;
        }
        let a = a as i128;
        let h2 = a * h1 + h0;
        let k2 = a * k1 + k0;
        if k2 > max_den as i128 {
            break;
        }
        (h0, h1, k0, k1) = (h1, h2, k1, k2);
        let frac = value - a as f64;
        if frac.abs() < 1e-12 {
            break;
        }
        value = 1.0 / frac;
    }
    if k1 == 0 {
        return None;
    }
    Some(BigRational::new(BigInt::from(h1), BigInt::from(k1)))
}

impl Scalar for f64 {
    const EXACT: bool = false;
    const NAME: &'static str = "real";
    const ALGEBRAICALLY_CLOSED: bool = false;

    fn from_i64(v: i64) -> Self {
        v as f64
    }

    fn from_ratio(num: i64, den: i64) -> Self {
        num as f64 / den as f64
    }

    fn magnitude(&self) -> f64 {
        self.abs()
    }

    fn to_complex(&self) -> Complex64 {
        Complex64::new(*self, 0.0)
    }

    fn conj(&self) -> Self {
        *self
    }

    fn root_of_unity(k: i64, n: i64) -> Option<Self> {
        rational_root_of_unity(k, n).map(|v| v as f64)
    }

    fn two_cos(k: i64, n: i64) -> Option<Self> {
        let (k, n) = reduced_turn(k, n);
        Some(2.0 * (std::f64::consts::TAU * k as f64 / n as f64).cos())
    }

    fn eigenvalues(m: &Matrix<Self>, eps: f64) -> Vec<Self> {
        if m.rows() == 0 {
            return Vec::new();
        }
        let scale = 1.0 + m.max_abs();
        let mut out: Vec<f64> = Vec::new();
        for z in to_dmatrix_f64(m).complex_eigenvalues().iter() {
            if z.im.abs() > 1e-7 * scale {
                continue;
            }
            if !out.iter().any(|v| (v - z.re).abs() <= cluster_radius(eps, scale)) {
                out.push(z.re);
            }
        }
        out
    }

    fn sample<R: Rng + ?Sized>(rng: &mut R) -> Self {
        rng.gen_range(-1.0..1.0)
    }
}

fn cluster_radius(eps: f64, scale: f64) -> f64 {
    (eps.sqrt() * scale).max(1e-6 * scale)
}

impl Scalar for Complex64 {
    const EXACT: bool = false;
    const NAME: &'static str = "complex";
    const ALGEBRAICALLY_CLOSED: bool = true;

    fn from_i64(v: i64) -> Self {
        Complex64::new(v as f64, 0.0)
    }

    fn from_ratio(num: i64, den: i64) -> Self {
        Complex64::new(num as f64 / den as f64, 0.0)
    }

    fn magnitude(&self) -> f64 {
        self.norm()
    }

    fn to_complex(&self) -> Complex64 {
        *self
    }

    fn conj(&self) -> Self {
        Complex64::conj(self)
    }

    fn root_of_unity(k: i64, n: i64) -> Option<Self> {
        let (k, n) = reduced_turn(k, n);
        Some(Complex64::from_polar(1.0, std::f64::consts::TAU * k as f64 / n as f64))
    }

    fn two_cos(k: i64, n: i64) -> Option<Self> {
        f64::two_cos(k, n).map(|v| Complex64::new(v, 0.0))
    }

    fn eigenvalues(m: &Matrix<Self>, eps: f64) -> Vec<Self> {
        if m.rows() == 0 {
            return Vec::new();
        }
        let scale = 1.0 + m.max_abs();
        let dm = DMatrix::from_fn(m.rows(), m.cols(), |r, c| m[(r, c)]);
        let Some(values) = dm.eigenvalues() else {
            return Vec::new();
        };
        let mut out: Vec<Complex64> = Vec::new();
        for z in values.iter() {
            if !out.iter().any(|v| (v - z).norm() <= cluster_radius(eps, scale)) {
                out.push(*z);
            }
        }
        out
    }

    fn sample<R: Rng + ?Sized>(rng: &mut R) -> Self {
        Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
    }
}

/// Exact rational scalar with arbitrary-precision numerator and denominator.
pub type Rational = BigRational;
