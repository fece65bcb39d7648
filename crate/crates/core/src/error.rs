use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("ground set must contain between 1 and {max} arms, got {n}")]
    GroundSetSize { n: usize, max: usize },

    #[error("expected {expected} arm labels, got {got}")]
    LabelCount { expected: usize, got: usize },

    #[error("arm index {index} out of range for ground set of {n} arms")]
    ArmOutOfRange { index: usize, n: usize },

    #[error("invalid arm set `{0}`")]
    ArmSetSyntax(String),

    #[error("horizon must be at least {min}, got {got}")]
    HorizonTooShort { got: u64, min: u64 },

    #[error("enumeration over {n} arms exceeds the limit of {limit}")]
    EnumerationGuard { n: usize, limit: usize },

    #[error("environment has no exact expectations")]
    ApproximateOnly,

    #[error("invalid environment: {0}")]
    InvalidEnvironment(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("invalid config: {0}")]
    Config(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}:{line}: {msg}")]
    Parse {
        path: PathBuf,
        line: usize,
        msg: String,
    },

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
