use thiserror::Error;

/// Errors raised across the crate.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum QgateError {
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("resource limit exceeded: {0}")]
    Resource(String),
    #[error("invalid index: {0}")]
    InvalidIndex(String),
    #[error("non-finite value: {0}")]
    NonFinite(String),
    #[error("matrix is not Hermitian (max deviation {0:.3e})")]
    NonHermitian(f64),
    #[error("postselection impossible: outcome probability {probability:.3e} on qubit {qubit}")]
    PostselectionImpossible { qubit: usize, probability: f64 },
    #[error("internal consistency violated: {0}")]
    InternalConsistency(String),
    #[error("malformed program: {0}")]
    MalformedProgram(String),
    #[error("frame mismatch: {0}")]
    FrameMismatch(String),
    #[error("invalid entanglement transfer: {0}")]
    InvalidTransfer(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("i/o error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, QgateError>;

impl From<std::io::Error> for QgateError {
    fn from(e: std::io::Error) -> Self {
        QgateError::Io(e.to_string())
    }
}
