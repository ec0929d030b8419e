use std::path::PathBuf;

use thiserror::Error;

/// Errors produced anywhere in the estimation toolkit.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("numeric overflow: {0}")]
    NumericOverflow(String),

    #[error("solver did not converge after {iterations} iterations (KKT violation {violation:e})")]
    Convergence { iterations: u64, violation: f64 },

    #[error("division domain error: {0}")]
    DivisionDomain(String),

    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("param string: flag `{flag}`: {reason}")]
    ParamParse { flag: String, reason: String },

    #[error("model format: {0}")]
    Format(String),

    #[error("grid search failed: {0}")]
    Search(String),

    #[error("{path}: line {line}: {reason}")]
    Record {
        path: PathBuf,
        line: u64,
        reason: String,
    },

    #[error("pipeline stage `{stage}` failed: {source}")]
    Stage {
        stage: &'static str,
        #[source]
        source: Box<Error>,
    },

    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// Process exit code for the CLI: 1 validation, 2 convergence, 3 I/O.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Convergence { .. } | Error::Search(_) => 2,
            Error::Io { .. } => 3,
            Error::Stage { source, .. } => source.exit_code(),
            _ => 1,
        }
    }
}
