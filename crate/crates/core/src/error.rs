use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("state index {index} out of range for grid with {len} states")]
    StateOutOfRange { index: usize, len: usize },

    #[error("degenerate geometry: transmitter and receiver are co-located")]
    DegenerateGeometry,

    #[error("grid has {states} states, above the exhaustive-search limit of {limit}")]
    GridTooLarge { states: usize, limit: usize },

    #[error("{path}: I/O error")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: {message}")]
    Format { path: PathBuf, message: String },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn format(path: impl Into<PathBuf>, message: impl ToString) -> Self {
        Error::Format {
            path: path.into(),
            message: message.to_string().trim_end().to_string(),
        }
    }
}
