//! Error type shared by every module.

use thiserror::Error;

/// Errors raised by assembly, solves, evolution and the scenario runner.
#[derive(Debug, Error)]
pub enum FsiError {
    /// Invalid configuration or input outside the supported range.
    #[error("configuration error: {0}")]
    Config(String),

    /// The beam touches (or crosses) the channel bottom: `1 + eta <= tol`.
    #[error("contact: min(1 + eta) = {min_gap:.3e} at s = {at_s:.6} (t = {time:?})")]
    Contact {
        min_gap: f64,
        at_s: f64,
        time: Option<f64>,
    },

    /// An iteration failed to converge; `history` holds the relative updates.
    #[error("no convergence after {iterations} iterations (last update {last:.3e})")]
    NonConvergence {
        iterations: usize,
        last: f64,
        history: Vec<f64>,
    },

    /// A factorization broke down or a matrix is numerically singular.
    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("input rejected: {0}")]
    Rejected(String),

    #[error("i/o error at {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error("parse error: {0}")]
    Parse(String),
}

impl FsiError {
    /// Process exit code used by the scenario runner.
    pub fn exit_code(&self) -> i32 {
        match self {
            FsiError::Config(_) | FsiError::Parse(_) | FsiError::Rejected(_) => 2,
            FsiError::Contact { .. } => 3,
            FsiError::NonConvergence { .. } => 4,
            FsiError::Numerical(_) | FsiError::Io { .. } => 5,
        }
    }

    /// Short machine-readable tag for error records.
    pub fn kind(&self) -> &'static str {
        match self {
            FsiError::Config(_) => "config",
            FsiError::Contact { .. } => "contact",
            FsiError::NonConvergence { .. } => "non-convergence",
            FsiError::Numerical(_) => "numerical",
            FsiError::Rejected(_) => "rejected",
            FsiError::Io { .. } => "io",
            FsiError::Parse(_) => "parse",
        }
    }

    pub(crate) fn io(path: impl AsRef<std::path::Path>, source: std::io::Error) -> Self {
        FsiError::Io {
            path: path.as_ref().display().to_string(),
            source,
        }
    }
}

pub type Result<T> = std::result::Result<T, FsiError>;
