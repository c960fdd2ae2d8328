use thiserror::Error;

/// Crate-wide error type. Variants carry enough context to produce a useful
/// one-line diagnostic; callers that need machine-readable output serialize
/// the `Display` form.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid dimension: {0}")]
    InvalidDimension(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("length mismatch: {0}")]
    LengthMismatch(String),

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("record rejected: {0}")]
    RecordRejected(String),

    #[error("exact oracle unavailable: {0}")]
    OracleUnavailable(String),

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error("undefined result: {0}")]
    Undefined(String),

    #[error("missing data: {0}")]
    MissingData(String),

    #[error("refusing to overwrite {0} (pass --force to allow)")]
    WouldOverwrite(String),

    #[error("io error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub fn io(path: impl Into<String>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
