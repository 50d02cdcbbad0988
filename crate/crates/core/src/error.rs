use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("trajectory must contain at least one point")]
    EmptyTrajectory,
    #[error("non-finite coordinate in {0}")]
    NonFiniteCoordinate(&'static str),
    #[error("image dimensions must be positive, got {width}x{height}")]
    NonPositiveDimension { width: f64, height: f64 },
    #[error("distance must be non-negative and finite, got {0}")]
    InvalidDistance(f64),
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("unknown config key `{0}`")]
    UnknownConfigKey(String),
    #[error("non-finite value at index {0}")]
    NonFiniteValue(usize),
    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },
    #[error("group must contain at least one reward")]
    EmptyGroup,
    #[error("batch mixes task kinds: expected {expected}, found {found} at index {index}")]
    MixedTaskKinds {
        expected: &'static str,
        found: &'static str,
        index: usize,
    },
    #[error("no {0} records to evaluate")]
    EmptyPool(&'static str),
    #[error("dataset {0} contains no records")]
    EmptyDataset(PathBuf),
    #[error("{} schema error(s), first at line {}: {}", .0.len(), .0[0].line, .0[0].message)]
    Schema(Vec<SchemaError>),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("serialization failed: {0}")]
    Serialize(String),
}

/// A record-level validation failure, with its 1-based line number.
#[derive(Debug, Clone, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct SchemaError {
    pub line: usize,
    pub message: String,
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// Stable machine-readable code, carried across language boundaries.
    pub fn code(&self) -> &'static str {
        match self {
            Error::EmptyTrajectory => "EMPTY_TRAJECTORY",
            Error::NonFiniteCoordinate(_) => "NON_FINITE_COORDINATE",
            Error::NonPositiveDimension { .. } => "NON_POSITIVE_DIMENSION",
            Error::InvalidDistance(_) => "INVALID_DISTANCE",
            Error::InvalidConfig(_) => "INVALID_CONFIG",
            Error::UnknownConfigKey(_) => "UNKNOWN_CONFIG_KEY",
            Error::NonFiniteValue(_) => "NON_FINITE_VALUE",
            Error::LengthMismatch { .. } => "LENGTH_MISMATCH",
            Error::EmptyGroup => "EMPTY_GROUP",
            Error::MixedTaskKinds { .. } => "MIXED_TASK_KINDS",
            Error::EmptyPool(_) => "EMPTY_POOL",
            Error::EmptyDataset(_) => "EMPTY_DATASET",
            Error::Schema(_) => "SCHEMA",
            Error::Io { .. } => "IO",
            Error::Serialize(_) => "SERIALIZE",
        }
    }

    /// Process exit code used by the command line tool.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Io { .. } | Error::Serialize(_) => 1,
            _ => 2,
        }
    }
}
