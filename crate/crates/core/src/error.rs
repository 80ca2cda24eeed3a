use thiserror::Error;

/// Errors raised by the library. Parse errors carry the 1-based line number.
#[derive(Debug, Error)]
pub enum Error {
    #[error("malformed graph text {text:?}: {reason}")]
    MalformedGraph { text: String, reason: String },
    #[error("unsupported size: {0}")]
    Unsupported(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("unknown key {0}")]
    UnknownKey(String),
    #[error("solver: {0}")]
    Solver(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn parse(line: usize, msg: impl Into<String>) -> Self {
        Error::Parse { line, msg: msg.into() }
    }

    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }
}
