use thiserror::Error;

/// Errors surfaced by the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("capacity exceeded: {what} needs {requested}, limit is {limit}")]
    Capacity {
        what: &'static str,
        requested: usize,
        limit: usize,
    },

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("invalid topology: {0}")]
    InvalidTopology(String),

    #[error("ensemble is not Markov-representable: {0}")]
    NotMarkovian(String),

    #[error("rotation is not lumpable onto (0, z, xi): {0}")]
    NotLumpable(String),

    #[error("probability drift {drift:e} at step {step} exceeds tolerance")]
    Drift { step: usize, drift: f64 },

    #[error("iteration did not converge after {iterations} steps (last estimate {last_estimate})")]
    NonConvergence { iterations: usize, last_estimate: f64 },

    #[error("non-positive value {value} at step {step}; truncate the series before the noise floor")]
    NonPositive { step: f64, value: f64 },

    #[error("not enough points for a fit: need {needed}, have {have}")]
    TooFewPoints { needed: usize, have: usize },

    #[error("parse error on line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    /// Process exit status for the `prq` binary: 2 usage, 3 capacity,
    /// 4 non-convergence, 1 anything else.
    pub fn exit_code(&self) -> u8 {
        match self {
            Error::InvalidArgument(_) | Error::InvalidTopology(_) | Error::DimensionMismatch { .. } => 2,
            Error::Capacity { .. } => 3,
            Error::NonConvergence { .. } => 4,
            _ => 1,
        }
    }

    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }

    pub(crate) fn io(path: impl AsRef<std::path::Path>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.as_ref().display().to_string(),
            source,
        }
    }
}
