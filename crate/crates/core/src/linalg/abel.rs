//! Abel limits `lim_{s->1} (1-s)(I - sP)^{-1}` of substochastic matrices.
//!
//! The limit is the projection onto `ker(I - P)` along `im(I - P)`. With a
//! basis `R` of right fixed vectors (columns) and `L` of left fixed vectors
//! (rows), `im(I - P)` is the annihilator of `L`, so the projection is
//! `R (L R)^{-1} L`. `L R` is invertible exactly when the two subspaces meet
//! only in zero.

use num_traits::{One, ToPrimitive};

use super::elim::{kernel_basis, left_kernel_basis};
use super::RationalMatrix;
use crate::error::{Error, Result};
use crate::rational::Rational;

pub fn abel_limit(p: &RationalMatrix) -> Result<RationalMatrix> {
    if !p.is_square() {
        return Err(Error::NotSquare {
            rows: p.rows(),
            cols: p.cols(),
        });
    }
    p.check_substochastic()?;
    spectral_projection_at_one(p)
}

/// Projection onto the eigenvalue-1 eigenspace along the complementary
/// invariant subspace, for any square matrix semisimple at 1.
pub(crate) fn spectral_projection_at_one(p: &RationalMatrix) -> Result<RationalMatrix> {
    let n = p.rows();
    let defect = &RationalMatrix::identity(n) - p;
    let right = kernel_basis(&defect);
    if right.is_empty() {
        return Ok(RationalMatrix::zeros(n, n));
    }
    let left = left_kernel_basis(&defect);
    debug_assert_eq!(left.len(), right.len());
    let a = right.len();
    let r = RationalMatrix::from_fn(n, a, |i, j| right[j][i].clone());
    let l = RationalMatrix::from_fn(a, n, |i, j| left[i][j].clone());
    let gram = &l * &r;
    let inv = gram.inverse().map_err(|_| Error::NotSemisimple)?;
    Ok(&(&r * &inv) * &l)
}

/// `(1 - s)(I - sP)^{-1}`, computed exactly. Cross-check oracle only.
pub fn abel_numeric(p: &RationalMatrix, s: &Rational) -> Result<RationalMatrix> {
    if !p.is_square() {
        return Err(Error::NotSquare {
            rows: p.rows(),
            cols: p.cols(),
        });
    }
    let n = p.rows();
    let resolvent = (&RationalMatrix::identity(n) - &p.scale(s)).inverse()?;
    Ok(resolvent.scale(&(Rational::one() - s)))
}

/// Dimension of the fixed space of `P`, read off as `trace(Omega)`.
pub fn fixed_space_dimension(p: &RationalMatrix) -> Result<usize> {
    let omega = abel_limit(p)?;
    let t = omega.trace();
    debug_assert!(t.is_integer());
    Ok(t.to_integer()
        .to_usize()
        .expect("trace of a projection is a small integer"))
}

/// A substochastic matrix together with its Abel limit.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralProjection {
    pub source: RationalMatrix,
    pub omega: RationalMatrix,
    pub fixed_rank: usize,
}

impl SpectralProjection {
    pub fn of(source: RationalMatrix) -> Result<Self> {
        let omega = abel_limit(&source)?;
        let fixed_rank = omega
            .trace()
            .to_integer()
            .to_usize()
            .expect("trace of a projection is a small integer");
        Ok(Self {
            source,
            omega,
            fixed_rank,
        })
    }

    /// `Omega^2 = Omega`, `P Omega = Omega P = Omega`.
    pub fn satisfies_limit_relations(&self) -> bool {
        let o = &self.omega;
        &(o * o) == o && &(&self.source * o) == o && &(o * &self.source) == o
    }
}
