//! Crate-wide error type and exit-code mapping.

use std::path::PathBuf;

/// Errors raised by any pipeline stage.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    /// Malformed or truncated input file.
    #[error("{path}: {message}")]
    Format { path: PathBuf, message: String },

    /// Invalid configuration or arguments.
    #[error("{0}")]
    Usage(String),

    /// Data does not satisfy an operation's preconditions.
    #[error("{0}")]
    Data(String),

    #[error("requested top {requested} patterns but only {available} distinct patterns exist")]
    InsufficientPatterns { requested: usize, available: usize },

    #[error(
        "train-pair quotas need {needed} pattern pairs with non-zero similarity, found {available}"
    )]
    InsufficientTrainPairs { needed: usize, available: usize },

    #[error("unknown pattern id {id} (store holds {count} patterns)")]
    UnknownPattern { id: u32, count: usize },

    #[error("pattern {id} has an empty support set")]
    EmptySupport { id: u32 },

    #[error("dimension mismatch: expected {expected}, found {found} ({context})")]
    DimensionMismatch {
        expected: usize,
        found: usize,
        context: String,
    },

    /// Non-finite value encountered; training aborts with context.
    #[error("non-finite value: {0}")]
    NonFinite(String),

    #[error("missing artifact {path} for stage `{stage}`; run `{run_first}` first")]
    MissingArtifact {
        stage: String,
        path: PathBuf,
        run_first: String,
    },
}

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub fn format(path: impl Into<PathBuf>, message: impl Into<String>) -> Self {
        Error::Format {
            path: path.into(),
            message: message.into(),
        }
    }

    /// Process exit code: 1 usage, 2 data, 3 numeric divergence.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Usage(_) => 1,
            Error::NonFinite(_) => 3,
            _ => 2,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
