use std::path::PathBuf;

/// Errors raised across the toolkit.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("capacity error: {0}")]
    Capacity(String),

    #[error("validation error: {0}")]
    Validation(String),

    #[error("index error: qubit {index} out of range for {num_qubits} qubits")]
    Index { index: usize, num_qubits: usize },

    #[error("binding error: {0}")]
    Binding(String),

    #[error("numeric error at iteration {iteration}: {message}")]
    Numeric { iteration: usize, message: String },

    #[error("parse error at {path}:{line}: {message}")]
    Parse { path: String, line: usize, message: String },

    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("serialization error: {0}")]
    Serde(String),

    #[error("stage `{stage}` failed: {source}")]
    Stage {
        stage: &'static str,
        #[source]
        source: Box<Error>,
    },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn validation(msg: impl Into<String>) -> Self {
        Error::Validation(msg.into())
    }

    pub(crate) fn binding(msg: impl Into<String>) -> Self {
        Error::Binding(msg.into())
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// Wraps the error with the name of the pipeline stage it came from.
    pub fn in_stage(self, stage: &'static str) -> Self {
        Error::Stage {
            stage,
            source: Box::new(self),
        }
    }

    /// Attaches an iteration index to a numeric error raised by an oracle.
    pub(crate) fn at_iteration(self, iteration: usize) -> Self {
        match self {
            Error::Numeric { message, .. } => Error::Numeric { iteration, message },
            other => other,
        }
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Serde(e.to_string())
    }
}
