use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },

    #[error("matrix is not Hermitian (deviation {deviation:.3e})")]
    NotHermitian { deviation: f64 },

    #[error("duration must be positive, got {0}")]
    NonPositiveDuration(f64),

    #[error("time must be non-negative, got {0}")]
    NegativeTime(f64),

    #[error("inverse temperature must be non-negative, got {0}")]
    NegativeBeta(f64),

    #[error("index {index} out of range for dimension {dim}")]
    IndexOutOfRange { index: usize, dim: usize },

    #[error("invalid ancilla weights: {0}")]
    InvalidWeights(String),

    #[error("invalid density matrix: {0}")]
    InvalidState(String),

    #[error("invalid model: {0}")]
    InvalidModel(String),

    #[error("concurrence {0} outside [0, 1]")]
    ConcurrenceOutOfRange(f64),

    #[error("state drifted off the density-matrix manifold at step {step}: {reason}")]
    NumericalDrift { step: usize, reason: String },

    #[error("linear algebra failure: {0}")]
    Numerical(String),
}
