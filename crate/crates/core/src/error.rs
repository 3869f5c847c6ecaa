use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// A component of the density matrix or field became NaN or infinite,
    /// usually because the step size is too large for the field strength.
    #[error("non-finite state at Z index {z_index}, T index {t_index}")]
    NonFiniteState { z_index: usize, t_index: usize },

    #[error("window too narrow: envelope is {value:.3e} at the window edge (threshold {threshold:.1e})")]
    WindowTooNarrow { value: f64, threshold: f64 },

    #[error("input intensity is zero")]
    ZeroInput,

    #[error(transparent)]
    ImprintNotFound(#[from] crate::analysis::ImprintNotFound),

    #[error("retrieval failed: {0}")]
    RetrievalFailed(String),

    /// Some runs or checks did not succeed; results were still written.
    #[error("incomplete: {0}")]
    Incomplete(String),

    #[error("validation error: {0}")]
    Validation(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::Validation(msg.into())
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io { path: path.into(), source }
    }

    /// Process exit status for the command-line runner.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Validation(_) | Error::Parse(_) => 1,
            Error::Io { .. } => 3,
            _ => 2,
        }
    }
}
