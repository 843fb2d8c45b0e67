use thiserror::Error;

use crate::rational::Rational;

/// Errors raised by the exact pipeline.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch in {op}: {left} vs {right}")]
    DimensionMismatch {
        op: &'static str,
        left: String,
        right: String,
    },
    #[error("matrix must be square, got {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },
    #[error("matrix is not substochastic: {0}")]
    NotSubstochastic(String),
    #[error("matrix is not stochastic: {0}")]
    NotStochastic(String),
    #[error("eigenvalue 1 is not semisimple: ker(I-P) meets im(I-P) nontrivially")]
    NotSemisimple,
    #[error("matrix is singular")]
    SingularMatrix,
    #[error("linear system has no solution")]
    InconsistentSystem,
    #[error("structure violation: {0}")]
    StructureViolation(String),
    #[error("index out of range: {0}")]
    IndexOutOfRange(String),
    #[error("limit measure leaks mass {0} outside the kernel")]
    SupportLeak(Rational),
    #[error("size {size} exceeds cap {cap}")]
    SizeCap { size: usize, cap: usize },
    #[error("matrix is not symmetric with zero diagonal")]
    NotSymmetricZeroDiag,
    #[error("operation needs exactly two colors, got {0}")]
    TwoColorOnly(usize),
    #[error("top level limit vanishes")]
    ZeroTopLevel,
    #[error("cross-check mismatch for {what}: {detail}")]
    CrossCheckMismatch { what: String, detail: String },
    #[error("parse error: {0}")]
    Parse(String),
    #[error("graph is not regular: {0}")]
    NotRegular(String),
    #[error("graph is not strongly connected")]
    NotStronglyConnected,
    #[error("graph is periodic (period {0})")]
    Periodic(usize),
    #[error("invalid weights: {0}")]
    InvalidWeights(String),
    #[error("no generators given")]
    EmptyGenerators,
}

pub type Result<T> = std::result::Result<T, Error>;
