use thiserror::Error;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

/// Everything that can go wrong while building or analyzing cat states.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {context} (expected {expected}, got {got})")]
    DimensionMismatch {
        context: &'static str,
        expected: usize,
        got: usize,
    },

    #[error("vector set is linearly dependent (elimination residual {residual:.3e})")]
    LinearDependence { residual: f64 },

    #[error("zero or near-zero norm where a unit vector is required (norm {norm:.3e})")]
    ZeroNorm { norm: f64 },

    #[error("non-finite value encountered in {context}")]
    NonFinite { context: &'static str },

    #[error("inputs are not orthonormal: {context} (residual {residual:.3e})")]
    NotOrthonormal { context: &'static str, residual: f64 },

    #[error("value {value} outside valid range {range} for {context}")]
    OutOfRange {
        context: &'static str,
        value: f64,
        range: &'static str,
    },

    #[error("singular configuration: {0}")]
    SingularConfiguration(&'static str),

    #[error("invalid state data: {0}")]
    InvalidState(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("serialization error: {0}")]
    Json(#[from] serde_json::Error),
}
