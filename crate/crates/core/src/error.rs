use std::path::PathBuf;

use thiserror::Error;

/// Errors produced by priors, samplers, forward models and the runner.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("index {index} out of range 1..={max}")]
    OutOfRange { index: usize, max: usize },

    #[error("point {point:?} lies outside the domain {domain}")]
    OutsideDomain { point: Vec<f64>, domain: String },

    #[error("non-finite value encountered in {0}")]
    NonFinite(&'static str),

    #[error("target provides no gradient")]
    MissingGradient,

    #[error("target provides no Gaussian misfit structure")]
    MissingMisfit,

    #[error("partition block {0} is empty")]
    EmptyBlock(usize),

    #[error("state mask does not match the requested operation: {0}")]
    MaskMismatch(&'static str),

    #[error("linear system is singular or not positive definite (pivot {pivot} at row {row})")]
    SingularSystem { row: usize, pivot: f64 },

    #[error("config error at `{path}`: {message}")]
    Config { path: String, message: String },

    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("JSON error: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }

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
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
