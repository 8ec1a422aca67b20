use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("size mismatch: {completions} completions but {expected} expected-answer lists")]
    SizeMismatch { completions: usize, expected: usize },

    #[error("degenerate group: advantages need at least 2 rewards, got {0}")]
    DegenerateGroup(usize),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("cannot split {available} records into {train} train + {test} test")]
    Oversubscribed { train: usize, test: usize, available: usize },

    #[error("empty training curve")]
    EmptyCurve,

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{0}")]
    Validation(String),
}

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io { path: path.into(), source }
    }

    /// True for failures of the file system rather than of the input data.
    pub fn is_io(&self) -> bool {
        matches!(self, Error::Io { .. })
    }
}
