use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected_width}x{expected_height}, found {found_width}x{found_height}")]
    DimensionMismatch {
        expected_width: usize,
        expected_height: usize,
        found_width: usize,
        found_height: usize,
    },

    #[error("grid dimensions must be at least 1x1 (got {width}x{height})")]
    EmptyGrid { width: usize, height: usize },

    #[error("grid of {width}x{height} needs {expected} values, got {found}")]
    GridLength {
        width: usize,
        height: usize,
        expected: usize,
        found: usize,
    },

    #[error("class id {0} is not in the taxonomy")]
    UnknownClass(u32),

    #[error("invalid taxonomy: {0}")]
    InvalidTaxonomy(String),

    #[error("invalid track box: {0}")]
    InvalidBox(String),

    #[error("invalid class binding: {0}")]
    InvalidBinding(String),

    #[error("sequence length mismatch: expected {expected}, found {found}")]
    SequenceLengthMismatch { expected: usize, found: usize },

    #[error("instance {0} has no entry in the id assignment")]
    IncompleteAssignment(u32),

    #[error("invalid scene config: {0}")]
    InvalidConfig(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("bad magic in {what}")]
    BadMagic { what: &'static str },

    #[error("truncated {what}: needed {needed} bytes, found {found}")]
    Truncated {
        what: &'static str,
        needed: usize,
        found: usize,
    },

    #[error("{what} has {extra} trailing bytes")]
    TrailingData { what: &'static str, extra: usize },

    #[error("{what} dimensions {width}x{height} overflow")]
    Overflow {
        what: &'static str,
        width: u64,
        height: u64,
    },

    #[error("non-finite flow component at pixel ({x}, {y})")]
    NonFinite { x: usize, y: usize },

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("manifest {path}: {message}")]
    Manifest { path: PathBuf, message: String },

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    /// Short machine-readable name of the variant.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::DimensionMismatch { .. } => "DimensionMismatch",
            Error::EmptyGrid { .. } => "EmptyGrid",
            Error::GridLength { .. } => "GridLength",
            Error::UnknownClass(_) => "UnknownClass",
            Error::InvalidTaxonomy(_) => "InvalidTaxonomy",
            Error::InvalidBox(_) => "InvalidBox",
            Error::InvalidBinding(_) => "InvalidBinding",
            Error::SequenceLengthMismatch { .. } => "SequenceLengthMismatch",
            Error::IncompleteAssignment(_) => "IncompleteAssignment",
            Error::InvalidConfig(_) => "InvalidConfig",
            Error::InvalidArgument(_) => "InvalidArgument",
            Error::BadMagic { .. } => "BadMagic",
            Error::Truncated { .. } => "Truncated",
            Error::TrailingData { .. } => "TrailingData",
            Error::Overflow { .. } => "Overflow",
            Error::NonFinite { .. } => "NonFinite",
            Error::Parse { .. } => "ParseError",
            Error::Manifest { .. } => "ManifestError",
            Error::Json(_) => "JsonError",
            Error::Io { .. } => "IoError",
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
