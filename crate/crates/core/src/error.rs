use alloc::string::String;

/// Errors raised by the core algorithms.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("unknown document id `{0}`")]
    UnknownId(String),

    #[error("document `{0}` has no content")]
    ContentMissing(String),

    #[error("duplicate id `{0}`")]
    DuplicateId(String),

    #[error("shape mismatch: expected {expected}, got {found}")]
    ShapeMismatch { expected: String, found: String },

    #[error("dimension mismatch: expected {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("row {0} has zero norm")]
    ZeroRow(usize),

    #[error("zero vector has no direction")]
    ZeroVector,

    #[error("matrix contains non-finite entries")]
    NonFinite,

    #[error("SVD did not converge after {sweeps} sweeps (off-diagonal {residual:e})")]
    NoConvergence { sweeps: usize, residual: f64 },

    #[error("requested {requested} items but only {available} are available")]
    OutOfRange { requested: usize, available: usize },

    #[error("empty input: {0}")]
    Empty(&'static str),

    #[error("invalid configuration: {0}")]
    InvalidConfig(&'static str),
}

pub type Result<T> = core::result::Result<T, Error>;
