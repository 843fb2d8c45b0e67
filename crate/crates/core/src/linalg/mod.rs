//! Exact dense linear algebra over Q and Abel limits of (sub)stochastic
//! matrices.

mod abel;
mod chain;
pub mod elim;
mod matrix;

pub use abel::{abel_limit, abel_numeric, fixed_space_dimension, SpectralProjection};
pub use chain::SparseChain;
pub use elim::{image_basis, kernel_basis, left_kernel_basis, rank, solve};
pub use matrix::RationalMatrix;
