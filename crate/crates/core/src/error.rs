use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("constellation order {0} is not a supported power of 4")]
    InvalidOrder(usize),

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: String, actual: String },

    #[error("matrix is not Hermitian positive definite (pivot {pivot} = {value:e})")]
    NotPositiveDefinite { pivot: usize, value: f64 },

    #[error("matrix is not Hermitian (entry ({row}, {col}))")]
    NotHermitian { row: usize, col: usize },

    #[error("quadratic form has non-negligible imaginary part {0:e}")]
    NonRealQuadraticForm(f64),

    #[error("degenerate channel: whitened column {layer} has squared norm {gain:e}")]
    DegenerateChannel { layer: usize, gain: f64 },

    #[error("non-finite input: {0}")]
    NonFinite(String),

    #[error("index {index} out of range for length {len}")]
    IndexOutOfRange { index: usize, len: usize },
}
