use thiserror::Error;

/// Errors raised by the exact-computation layer.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("resource limit exceeded: {what} (cap {cap})")]
    ResourceLimit { what: String, cap: u64 },

    #[error("model construction failed: {0}")]
    ModelConstruction(String),

    #[error("discriminant shape violated: {0}")]
    ShapeViolation(String),

    #[error("base point {0} is postcritical and excluded")]
    ExcludedBasePoint(String),

    #[error("prime {prime} divides the leading coefficient")]
    BadPrime { prime: u64 },

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error("observation inconsistent with the level-4 model: {0}")]
    ModelInconsistency(String),

    #[error("degenerate preimage tree: {0}")]
    DegenerateTree(String),

    #[error("cache rejected: {0}")]
    Cache(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::InvalidArgument(msg.into()))
}
