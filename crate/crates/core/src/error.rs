use thiserror::Error;

/// Errors raised across the simulation and analysis pipeline.
#[derive(Debug, Error)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// A source configuration violates its invariants.
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    /// Measurement records required by an estimator are absent.
    #[error("missing settings: {}", .0.join(", "))]
    MissingSettings(Vec<String>),

    /// A group of counts that must be non-empty sums to zero.
    #[error("zero total counts for {0}")]
    ZeroTotal(String),

    /// Malformed input data.
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    /// An estimator or fit could not produce a result.
    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
