use std::path::PathBuf;

use thiserror::Error;

use crate::mask::Dims;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: Dims, found: Dims },

    #[error("invalid mask dimensions {width}x{height}: {reason}")]
    InvalidDimensions {
        width: u64,
        height: u64,
        reason: &'static str,
    },

    #[error("pixel ({row}, {col}) lies outside a {dims} mask")]
    PixelOutOfBounds { row: u32, col: u32, dims: Dims },

    #[error("{0} is undefined for an empty mask")]
    EmptyMask(&'static str),

    #[error("invalid run-length encoding: {0}")]
    InvalidRle(String),

    #[error("unsupported mask image: {0}")]
    UnsupportedImage(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("duplicate candidate id `{0}`")]
    DuplicateId(String),

    #[error("finalist list is empty")]
    NoFinalists,

    #[error("ground truth mask is empty")]
    EmptyTruth,

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("records mix methods `{0}` and `{1}`")]
    MixedMethods(String, String),

    #[error("no scored records to aggregate")]
    NoScoredRecords,

    #[error("record sets disagree on image ids; missing from method: [{missing_in_method}], missing from annotator: [{missing_in_annotator}]")]
    IdMismatch {
        missing_in_method: String,
        missing_in_annotator: String,
    },

    #[error("invalid records file: {0}")]
    InvalidRecords(String),

    #[error("invalid manifest: {0}")]
    InvalidManifest(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: {source}")]
    Image {
        path: PathBuf,
        #[source]
        source: image::ImageError,
    },

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error("{path}: {source}")]
    AtPath {
        path: PathBuf,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn at(self, path: impl Into<PathBuf>) -> Self {
        match self {
            e @ (Error::Io { .. } | Error::Image { .. } | Error::AtPath { .. }) => e,
            e => Error::AtPath {
                path: path.into(),
                source: Box::new(e),
            },
        }
    }
}
