use thiserror::Error;

/// Errors produced by geometry, sampling, feature and regression routines.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("invalid point: {0}")]
    InvalidPoint(String),

    #[error("invalid group element: {0}")]
    InvalidGroupElement(String),

    #[error("matrix is singular or not invertible")]
    Singular,

    #[error("matrix is not symmetric positive definite")]
    NotPositiveDefinite,

    #[error("points belong to different spaces: {0} vs {1}")]
    SpaceMismatch(String, String),

    #[error("invalid kernel parameters: {0}")]
    InvalidSpec(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("rejection sampler exceeded {0} proposals without acceptance")]
    RejectionCap(usize),

    #[error("quadrature did not converge: {0}")]
    Quadrature(String),

    #[error("factorization failed after jitter {0:e}")]
    Factorization(f64),

    #[error("unsupported: {0}")]
    Unsupported(String),
}

pub type Result<T> = std::result::Result<T, Error>;
