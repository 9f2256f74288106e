use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("{what} out of range: {value} not in [{min}, {max}]")]
    OutOfRange {
        what: &'static str,
        value: f64,
        min: f64,
        max: f64,
    },

    #[error("network needs at least 2 nodes, got {0}")]
    TooFewNodes(usize),

    #[error("shape mismatch: expected {expected}, got {got}")]
    Shape { expected: String, got: String },

    #[error("mean field diverged at t = {t}: |alpha_{node}| = {magnitude:.3e}")]
    Divergence { t: f64, node: usize, magnitude: f64 },

    #[error("uncertainty relation violated at t = {t}: min eigenvalue {min_eigenvalue:.3e}")]
    NumericalInstability { t: f64, min_eigenvalue: f64 },

    #[error("invalid state: {0}")]
    InvalidState(String),

    #[error("ill-conditioned covariance: {0}")]
    Conditioning(String),

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error("Hilbert space of dimension {dim} exceeds the budget of {budget}")]
    Capacity { dim: usize, budget: usize },

    #[error("positivity violated at t = {t} (min eigenvalue {min_eigenvalue:.3e}); increase the truncation n_t")]
    TruncationTooSmall { t: f64, min_eigenvalue: f64 },

    #[error("config error: {0}")]
    Config(String),

    #[error("{context}: {source}")]
    Context {
        context: String,
        #[source]
        source: Box<Error>,
    },

    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub fn context(self, context: impl Into<String>) -> Self {
        Error::Context {
            context: context.into(),
            source: Box::new(self),
        }
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// Innermost error, skipping context wrappers.
    pub fn root(&self) -> &Error {
        match self {
            Error::Context { source, .. } => source.root(),
            other => other,
        }
    }

    /// Process exit code used by the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self.root() {
            Error::Config(_)
            | Error::InvalidParameter { .. }
            | Error::OutOfRange { .. }
            | Error::TooFewNodes(_)
            | Error::Shape { .. }
            | Error::Capacity { .. }
            | Error::Io { .. }
            | Error::Json(_) => 2,
            _ => 3,
        }
    }
}

pub(crate) fn shape_err(expected: impl ToString, got: impl ToString) -> Error {
    Error::Shape {
        expected: expected.to_string(),
        got: got.to_string(),
    }
}
