use thiserror::Error;

/// Errors produced across parsing, modeling, training, and evaluation.
#[derive(Debug, Error)]
pub enum Error {
    /// Malformed input line (wrong column count, unparseable structure).
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    /// An entry was declared with conflicting value kinds.
    #[error("schema error: {0}")]
    Schema(String),

    /// A value failed validation (non-finite number, empty token, ...).
    #[error("value error: {0}")]
    Value(String),

    /// Duplicate observation or ground-truth row.
    #[error("duplicate: {0}")]
    Duplicate(String),

    /// Reference to an entry or source that does not exist.
    #[error("unknown reference: {0}")]
    Reference(String),

    /// Invalid generator or run configuration.
    #[error("config error: {0}")]
    Config(String),

    /// Invalid argument to a library operation.
    #[error("invalid argument: {0}")]
    Argument(String),

    /// A token or memory lookup failed.
    #[error("lookup failed: {0}")]
    Lookup(String),

    /// Numeric failure (non-finite loss, gradient, or parameter).
    #[error("numeric failure: {0}")]
    Numeric(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
