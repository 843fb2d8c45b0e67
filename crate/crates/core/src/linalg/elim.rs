//! Gauss-Jordan elimination over Q.
//!
//! Pivots are the first nonzero entry scanning columns left to right, so the
//! reduced form and every basis derived from it are deterministic.

use num_traits::{One, Zero};

use super::RationalMatrix;
use crate::error::{Error, Result};
use crate::rational::Rational;

/// Reduced row echelon form and the pivot column of each nonzero row.
pub fn rref(m: &RationalMatrix) -> (RationalMatrix, Vec<usize>) {
    let (rows, cols) = m.shape();
    let mut a: Vec<Vec<Rational>> = (0..rows).map(|i| m.row(i).to_vec()).collect();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| !a[i][c].is_zero()) else {
            continue;
        };
        a.swap(r, p);
        let inv = a[r][c].recip();
        if !inv.is_one() {
            for x in a[r][c..].iter_mut() {
                if !x.is_zero() {
                    *x *= &inv;
                }
            }
        }
        let support: Vec<usize> = (c..cols).filter(|&j| !a[r][j].is_zero()).collect();
        let pivot_row = a[r].clone();
        for (i, row) in a.iter_mut().enumerate() {
            if i == r || row[c].is_zero() {
                continue;
            }
            let factor = row[c].clone();
            for &j in &support {
                row[j] -= &factor * &pivot_row[j];
            }
        }
        pivots.push(c);
        r += 1;
    }
    let data = a.into_iter().flatten().collect();
    (
        RationalMatrix::new(rows, cols, data).expect("rref preserves shape"),
        pivots,
    )
}

pub fn rank(m: &RationalMatrix) -> usize {
    rref(m).1.len()
}

/// Basis of `{x : M x = 0}`, one vector per free column.
pub fn kernel_basis(m: &RationalMatrix) -> Vec<Vec<Rational>> {
    let (red, pivots) = rref(m);
    let cols = m.cols();
    let mut is_pivot = vec![false; cols];
    for &p in &pivots {
        is_pivot[p] = true;
    }
    (0..cols)
        .filter(|&f| !is_pivot[f])
        .map(|f| {
            let mut v = vec![Rational::zero(); cols];
            v[f] = Rational::one();
            for (row, &p) in pivots.iter().enumerate() {
                v[p] = -red[(row, f)].clone();
            }
            v
        })
        .collect()
}

/// Basis of `{y : y M = 0}` (row vectors).
pub fn left_kernel_basis(m: &RationalMatrix) -> Vec<Vec<Rational>> {
    kernel_basis(&m.transpose())
}

/// Basis of the column space: the pivot columns of `M` itself.
pub fn image_basis(m: &RationalMatrix) -> Vec<Vec<Rational>> {
    rref(m).1.into_iter().map(|c| m.column(c)).collect()
}

/// One solution of `M x = rhs` (free variables set to zero).
pub fn solve(m: &RationalMatrix, rhs: &[Rational]) -> Result<Vec<Rational>> {
    let (rows, cols) = m.shape();
    if rhs.len() != rows {
        return Err(Error::DimensionMismatch {
            op: "solve",
            left: format!("{rows}x{cols}"),
            right: format!("rhs of length {}", rhs.len()),
        });
    }
    let aug = RationalMatrix::from_fn(rows, cols + 1, |i, j| {
        if j < cols {
            m[(i, j)].clone()
        } else {
            rhs[i].clone()
        }
    });
    let (red, pivots) = rref(&aug);
    if pivots.last() == Some(&cols) {
        return Err(Error::InconsistentSystem);
    }
    let mut x = vec![Rational::zero(); cols];
    for (row, &p) in pivots.iter().enumerate() {
        x[p] = red[(row, cols)].clone();
    }
    Ok(x)
}
