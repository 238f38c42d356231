use thiserror::Error;

/// Errors shared across the crate.
#[derive(Debug, Error)]
pub enum SegalError {
    #[error("arity mismatch: operator targets [{expected}] but the simplex lives in level {found}")]
    ArityMismatch { expected: usize, found: usize },

    #[error("level {level} is outside truncation {truncation}")]
    LevelOutOfRange { level: usize, truncation: usize },

    #[error("truncation mismatch: {left} vs {right}")]
    TruncationMismatch { left: usize, right: usize },

    #[error("simplicial set has {found} zero-simplices, expected exactly one")]
    NotReduced { found: usize },

    #[error("truncation {truncation} is too small, need at least {needed}")]
    TruncationTooSmall { truncation: usize, needed: usize },

    #[error("{map} is not a bijection: {reason}")]
    BijectionFailed { map: String, reason: String },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("malformed JSON: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, SegalError>;
