use thiserror::Error;

/// Errors raised by the toolkit.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("matrix is not Hermitian (max deviation {0:e})")]
    NotHermitian(f64),

    #[error("trace is {0} (expected 1)")]
    InvalidTrace(f64),

    #[error("matrix is not positive semi-definite (min eigenvalue {0:e})")]
    NotPositive(f64),

    #[error("vector is not normalized (norm {0})")]
    NotNormalized(f64),

    #[error("not a ±1 observable: {0}")]
    NotDichotomic(String),

    #[error("invalid measurement: {0}")]
    InvalidMeasurement(String),

    #[error("subsystem index {index} out of range for {count} subsystems")]
    SubsystemOutOfRange { index: usize, count: usize },

    #[error("parameter out of range: {0}")]
    OutOfRange(String),

    #[error("undefined value: {0}")]
    Undefined(String),

    #[error("not a valid two-qubit CHSH operator: {0}")]
    InvalidChshOperator(String),

    #[error("construction violates hypothesis: {0}")]
    HypothesisViolated(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
