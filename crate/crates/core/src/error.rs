use thiserror::Error;

/// Errors raised by the library. Each variant maps onto one CLI exit code.
#[derive(Debug, Error)]
pub enum Error {
    /// Malformed input: violated type invariant, bad file, bad argument.
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// Data that is well formed but admits no spectrum (indefinite Toeplitz or
    /// Pick matrix), or a singular case an operation cannot handle.
    #[error("infeasible data: {0}")]
    Infeasible(String),

    /// A numerical procedure failed to converge or produced inconsistent output.
    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("malformed JSON: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Process exit code used by the `specunc` binary.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::InvalidInput(_) | Error::Io(_) | Error::Json(_) => 1,
            Error::Infeasible(_) => 2,
            Error::Numerical(_) => 3,
        }
    }

    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }

    pub(crate) fn infeasible(msg: impl Into<String>) -> Self {
        Error::Infeasible(msg.into())
    }

    pub(crate) fn numerical(msg: impl Into<String>) -> Self {
        Error::Numerical(msg.into())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
