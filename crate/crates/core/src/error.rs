use thiserror::Error;

/// Errors raised by the library and surfaced by the command-line tool.
#[derive(Debug, Error)]
pub enum Error {
    #[error("index error: {0}")]
    Index(String),
    #[error("validation error: {0}")]
    Validation(String),
    #[error("argument error: {0}")]
    Argument(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("numerical error: {0}")]
    Numerical(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("invariant violation: {0}")]
    Invariant(String),
}

impl Error {
    /// Process exit code for the command-line tool: 1 input, 2 numerical, 3 invariant.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Numerical(_) => 2,
            Error::Invariant(_) => 3,
            _ => 1,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
