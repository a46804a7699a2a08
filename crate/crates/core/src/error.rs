use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = FksError> = std::result::Result<T, E>;

/// Error categories surfaced by the solver. Each category maps to a distinct
/// process exit code in the command-line front end.
#[derive(Debug, Error)]
pub enum FksError {
    #[error("configuration error: {0}")]
    Config(String),

    #[error("invalid state in cell {cell}: {reason}")]
    InvalidState { cell: usize, reason: String },

    #[error("CFL violation: |v|*dt = {displacement:e} exceeds dx = {dx:e}")]
    Cfl { displacement: f64, dx: f64 },

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("protocol error: {0}")]
    Protocol(String),

    #[error("transport error between worker {from} and worker {to}: {reason}")]
    Transport { from: usize, to: usize, reason: String },

    #[error("worker {worker} failed: {reason}")]
    Worker { worker: usize, reason: String },

    #[error("step {step}, worker {worker}: {source}")]
    AtStep {
        step: usize,
        worker: usize,
        #[source]
        source: Box<FksError>,
    },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl FksError {
    pub fn config(msg: impl Into<String>) -> Self {
        FksError::Config(msg.into())
    }

    pub fn protocol(msg: impl Into<String>) -> Self {
        FksError::Protocol(msg.into())
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        FksError::Io {
            path: path.into(),
            source,
        }
    }

    /// Innermost error, looking through step/worker context wrappers.
    pub fn root(&self) -> &FksError {
        match self {
            FksError::AtStep { source, .. } => source.root(),
            other => other,
        }
    }

    /// Process exit code for this error's category.
    pub fn exit_code(&self) -> i32 {
        match self.root() {
            FksError::Config(_) | FksError::Dimension(_) => 2,
            FksError::Protocol(_) => 3,
            FksError::InvalidState { .. } | FksError::Cfl { .. } => 4,
            FksError::Transport { .. } | FksError::Worker { .. } => 5,
            FksError::Io { .. } => 6,
            FksError::AtStep { .. } => unreachable!(),
        }
    }
}
