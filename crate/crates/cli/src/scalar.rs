//! Reading and writing scalars in problem files and reports.

use std::str::FromStr;

use gdiff_core::{Complex64, Matrix, Rational, Scalar};
use num_traits::ToPrimitive;
use serde_json::{json, Value};

pub trait CliScalar: Scalar {
    fn parse(v: &Value) -> Result<Self, String>;
    fn to_json(&self) -> Value;
}

fn parse_ratio(s: &str) -> Result<Rational, String> {
    Rational::from_str(s.trim()).map_err(|_| format!("cannot parse {s:?} as an exact rational"))
}

impl CliScalar for Rational {
    fn parse(v: &Value) -> Result<Self, String> {
        match v {
            Value::Number(n) => n
                .as_i64()
                .map(Rational::from_i64)
                .ok_or_else(|| format!("{n} is not exact; write rationals as integers or \"p/q\" strings")),
            Value::String(s) => parse_ratio(s),
            other => Err(format!("expected a rational scalar, found {other}")),
        }
    }

    fn to_json(&self) -> Value {
        Value::String(self.to_string())
    }
}

fn as_f64(v: &Value) -> Result<f64, String> {
    match v {
        Value::Number(n) => n.as_f64().ok_or_else(|| format!("{n} is not a finite number")),
        Value::String(s) => parse_ratio(s)?.to_f64().ok_or_else(|| format!("{s:?} is out of range")),
        other => Err(format!("expected a real number, found {other}")),
    }
}

/// `-0.0` prints differently from `0.0`; fold it so reports are canonical.
fn canonical(x: f64) -> f64 {
    if x == 0.0 {
        0.0
    } else {
        x
    }
}

impl CliScalar for Complex64 {
    fn parse(v: &Value) -> Result<Self, String> {
        match v {
            Value::Array(parts) if parts.len() == 2 => Ok(Complex64::new(as_f64(&parts[0])?, as_f64(&parts[1])?)),
            Value::Array(_) => Err("complex scalars are [re, im] pairs".into()),
            other => Ok(Complex64::new(as_f64(other)?, 0.0)),
        }
    }

    fn to_json(&self) -> Value {
        json!([canonical(self.re), canonical(self.im)])
    }
}

pub fn matrix_json<S: CliScalar>(m: &Matrix<S>) -> Value {
    Value::Array(m.to_rows().iter().map(|row| Value::Array(row.iter().map(CliScalar::to_json).collect())).collect())
}

pub fn matrices_json<S: CliScalar>(ms: &[Matrix<S>]) -> Value {
    Value::Array(ms.iter().map(matrix_json).collect())
}

pub fn parse_matrix<S: CliScalar>(rows: &[Vec<Value>], n: usize, m: usize) -> Result<Matrix<S>, String> {
    if rows.len() != n || rows.iter().any(|r| r.len() != m) {
        return Err(format!("expected a {n}x{m} matrix"));
    }
    let parsed = rows.iter().map(|r| r.iter().map(S::parse).collect::<Result<Vec<_>, _>>()).collect::<Result<Vec<_>, _>>()?;
    if n == 0 {
        return Ok(Matrix::zeros(0, m));
    }
    Ok(Matrix::from_rows(parsed))
}
