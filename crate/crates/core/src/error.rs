use std::path::PathBuf;
use std::time::Duration;

use thiserror::Error;

/// Errors produced anywhere in the analysis pipeline.
#[derive(Debug, Error)]
pub enum Error {
    #[error("correlation matrix is not positive definite (pivot {pivot})")]
    NotPositiveDefinite { pivot: usize },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("invalid correlation matrix: {0}")]
    InvalidCorrelation(String),

    #[error("invalid marginal: standard deviation must be positive and finite, got {0}")]
    InvalidMarginal(f64),

    #[error("probability {0} outside the open interval (0, 1)")]
    Domain(f64),

    #[error("dimension {dim} exceeds the supported maximum of {max}")]
    DimensionTooLarge { dim: usize, max: usize },

    #[error("sample matrix is in {found} space, expected {expected}")]
    WrongSpace {
        expected: &'static str,
        found: &'static str,
    },

    #[error("invalid permutation {0:?}")]
    InvalidPermutation(Vec<usize>),

    #[error("index {index} out of range for dimension {dim}")]
    IndexOutOfRange { index: usize, dim: usize },

    #[error("underdetermined fit: {nodes} nodes for {terms} basis terms without regularization")]
    Underdetermined { nodes: usize, terms: usize },

    #[error("model output is not finite (sample {sample}, output {output})")]
    NonFiniteOutput { sample: usize, output: usize },

    #[error("output variance is zero at time index {0}; Sobol indices are undefined")]
    ZeroVariance(usize),

    #[error("external model failed with {status}: {stderr}")]
    ProcessFailed { status: String, stderr: String },

    #[error("malformed model output: {0}")]
    MalformedOutput(String),

    #[error("external model exceeded the {0:?} wall-clock limit")]
    Timeout(Duration),

    #[error("invalid configuration at `{path}`: {message}")]
    Config { path: String, message: String },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn config(path: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Config {
            path: path.into(),
            message: message.into(),
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// True for errors caused by bad user input rather than a failed run.
    pub fn is_validation(&self) -> bool {
        matches!(
            self,
            Error::Config { .. }
                | Error::NotPositiveDefinite { .. }
                | Error::InvalidCorrelation(_)
                | Error::InvalidMarginal(_)
                | Error::DimensionMismatch { .. }
                | Error::DimensionTooLarge { .. }
        )
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
