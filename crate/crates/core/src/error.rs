use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("cannot accumulate rewards of an empty chain")]
    EmptyChain,

    #[error("step score {0} is outside [0, 1]")]
    ScoreOutOfRange(f64),

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("dataset is empty")]
    EmptyDataset,

    #[error("label {0} is not one of -1, 0, 1")]
    InvalidLabel(i64),

    #[error("{path}:{line}: {reason}")]
    Parse {
        path: PathBuf,
        line: usize,
        reason: String,
    },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: {reason}")]
    Config { path: PathBuf, reason: String },

    #[error("non-finite value in {0}")]
    NonFinite(String),
}

impl Error {
    pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// Numerical failures map to exit code 2, everything else to 1.
    pub fn is_numerical(&self) -> bool {
        matches!(self, Error::NonFinite(_))
    }
}
