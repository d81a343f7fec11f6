use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("degenerate interval [{start}, {end}]: end must be strictly after start")]
    DegenerateInterval { start: f64, end: f64 },

    #[error("invalid speed trace: {0}")]
    InvalidTrace(String),

    #[error("invalid load allocation: {0}")]
    InvalidAllocation(String),

    #[error("invalid sequence: {0}")]
    InvalidSequence(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("solver failure: {0}")]
    SolverFailure(String),

    #[error(
        "{n} workers exceed the exhaustive capacity of {cap}; use the hill-climbing or batch learners"
    )]
    Capacity { n: usize, cap: usize },

    #[error("invalid window [{t1}, {t2}] for {len} records")]
    InvalidWindow { t1: usize, t2: usize, len: usize },

    #[error("invalid posterior snapshot: {0}")]
    InvalidSnapshot(String),

    #[error("snapshot version mismatch: file has {found}, expected {expected}")]
    VersionMismatch { found: String, expected: String },

    #[error("trial {trial}: {source}")]
    Trial {
        trial: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),

    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn at_trial(self, trial: usize) -> Self {
        match self {
            e @ Error::Trial { .. } => e,
            e => Error::Trial {
                trial,
                source: Box::new(e),
            },
        }
    }

    /// The innermost error, looking through trial wrappers.
    pub fn root(&self) -> &Error {
        match self {
            Error::Trial { source, .. } => source.root(),
            e => e,
        }
    }

    /// Process exit code used by the command-line driver.
    pub fn exit_code(&self) -> i32 {
        match self.root() {
            Error::InvalidConfig(_)
            | Error::InvalidTrace(_)
            | Error::InvalidSequence(_)
            | Error::InvalidAllocation(_)
            | Error::DegenerateInterval { .. }
            | Error::DimensionMismatch { .. }
            | Error::InvalidWindow { .. }
            | Error::InvalidSnapshot(_)
            | Error::VersionMismatch { .. }
            | Error::Json(_)
            | Error::Csv(_) => 2,
            Error::SolverFailure(_) => 3,
            Error::Capacity { .. } => 4,
            _ => 1,
        }
    }
}
