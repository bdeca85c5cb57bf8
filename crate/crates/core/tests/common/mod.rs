#![allow(dead_code)]

use std::sync::Arc;

use gdiff_core::{Equation, HomogeneousSpace, Rational, Scalar};
use num_traits::Zero;

pub fn q(n: i64) -> Rational {
    Rational::from_i64(n)
}

pub fn dihedral(n: usize) -> Arc<HomogeneousSpace> {
    Arc::new(HomogeneousSpace::dihedral(n).unwrap())
}

/// Rank by Gauss–Jordan elimination over the rationals.
pub fn oracle_rank(mut rows: Vec<Vec<Rational>>) -> usize {
    let cols = rows.first().map_or(0, Vec::len);
    let mut rank = 0;
    for c in 0..cols {
        let Some(p) = (rank..rows.len()).find(|&r| !rows[r][c].is_zero()) else { continue };
        rows.swap(rank, p);
        let pivot_row = rows[rank].clone();
        for (r, row) in rows.iter_mut().enumerate() {
            if r != rank && !row[c].is_zero() {
                let f = row[c].clone() / pivot_row[c].clone();
                for (x, p) in row[c..].iter_mut().zip(&pivot_row[c..]) {
                    *x -= p.clone() * f.clone();
                }
            }
        }
        rank += 1;
    }
    rank
}

pub fn oracle_nullity(rows: Vec<Vec<Rational>>, cols: usize) -> usize {
    cols - oracle_rank(rows)
}

/// `dim {M : E^h(x₀) M = M F^h(x₀) for h in H}` from the raw connection data.
pub fn oracle_fiber_hom(e: &Equation<Rational>, f: &Equation<Rational>) -> usize {
    let (n, m) = (e.rank(), f.rank());
    let base = e.space().base_point();
    let mut rows = Vec::new();
    for &h in e.space().stabilizer().elements() {
        let (a, b) = (e.at(h, base), f.at(h, base));
        for i in 0..n {
            for k in 0..m {
                // (M b)_ik - (a M)_ik with M_jl at index j * m + l
                let mut row = vec![q(0); n * m];
                for l in 0..m {
                    row[i * m + l] += b[(l, k)].clone();
                }
                for j in 0..n {
                    row[j * m + k] -= a[(i, j)].clone();
                }
                rows.push(row);
            }
        }
    }
    oracle_nullity(rows, n * m)
}
