use thiserror::Error;

/// Errors raised by the bounds, oracles and linear algebra.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("non-finite input: {0}")]
    NonFinite(&'static str),

    #[error("standard deviation must be positive and finite, got {0}")]
    InvalidSigma(f64),

    #[error("mixtures do not share the same covariance")]
    SigmaMismatch,

    #[error("dimension mismatch: expected {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("matrix is not symmetric: |m[{row}][{col}] - m[{col}][{row}]| = {gap:e}")]
    NotSymmetric { row: usize, col: usize, gap: f64 },

    #[error("matrix is not positive definite: Cholesky pivot {pivot} is {value:e}")]
    NotPositiveDefinite { pivot: usize, value: f64 },

    #[error("numerical failure: {0}")]
    NumericalFailure(String),

    #[error("domain error: {0}")]
    DomainError(String),

    #[error("rejection sampling gave up after {0} rounds")]
    RetryLimitExceeded(usize),

    #[error("zero projection direction")]
    ZeroDirection,

    #[error("quadrature did not reach tolerance {tol:e} within {cap} subintervals")]
    QuadratureFailure { tol: f64, cap: usize },
}

pub type Result<T> = std::result::Result<T, Error>;
