use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("vector has dimension 0")]
    ZeroDimension,

    #[error("non-finite component at index {index} of vector {id}")]
    NonFinite { id: usize, index: usize },

    #[error("dataset is empty")]
    EmptyDataset,

    #[error("candidate set is empty")]
    EmptyCandidates,

    #[error("neighborhood is empty")]
    EmptyNeighborhood,

    #[error("id {id} out of range for dataset of {len} points")]
    IdOutOfRange { id: usize, len: usize },

    #[error("label {label} at position {index} is not below num_classes = {num_classes}")]
    LabelOutOfRange {
        index: usize,
        label: usize,
        num_classes: usize,
    },

    #[error("{vectors} vectors but {labels} labels")]
    LabelCountMismatch { vectors: usize, labels: usize },

    #[error("distances must be ascending; position {index} breaks the order")]
    NotAscending { index: usize },

    #[error("graph support is disconnected: no path from {from} to {to}")]
    Disconnected { from: usize, to: usize },

    #[error("index was built over a different dataset")]
    StaleIndex,

    #[error("{path}: {message} (byte offset {offset})")]
    Format {
        path: PathBuf,
        offset: u64,
        message: String,
    },

    #[error("{path}: line {line}: {message}")]
    LineFormat {
        path: PathBuf,
        line: usize,
        message: String,
    },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("invariant violated: {0}")]
    Invariant(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
