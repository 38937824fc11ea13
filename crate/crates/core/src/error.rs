use std::io;

/// Errors raised by the fusion, learning and evaluation pipeline.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// A caller passed arguments that violate an operation's shape or value contract.
    #[error("invalid argument: {0}")]
    Argument(String),
    /// The data itself cannot support the requested computation (missing pairs, open-set probes, ...).
    #[error("data error: {0}")]
    Data(String),
    /// A numerical routine failed (non-convergence, indefinite matrix, ...).
    #[error("numeric error: {message}")]
    Numeric { message: String, iterations: Option<usize> },
    #[error("format error: {0}")]
    Format(String),
    #[error(transparent)]
    Io(#[from] io::Error),
}

impl Error {
    pub(crate) fn arg(msg: impl Into<String>) -> Self {
        Error::Argument(msg.into())
    }

    pub(crate) fn data(msg: impl Into<String>) -> Self {
        Error::Data(msg.into())
    }

    pub(crate) fn numeric(msg: impl Into<String>) -> Self {
        Error::Numeric { message: msg.into(), iterations: None }
    }

    pub(crate) fn format(msg: impl Into<String>) -> Self {
        Error::Format(msg.into())
    }

    /// Attaches context (for example a trial index) to the message, keeping the variant.
    pub fn context(self, ctx: impl std::fmt::Display) -> Self {
        match self {
            Error::Argument(m) => Error::Argument(format!("{ctx}: {m}")),
            Error::Data(m) => Error::Data(format!("{ctx}: {m}")),
            Error::Numeric { message, iterations } => {
                Error::Numeric { message: format!("{ctx}: {message}"), iterations }
            }
            Error::Format(m) => Error::Format(format!("{ctx}: {m}")),
            Error::Io(e) => Error::Io(io::Error::new(e.kind(), format!("{ctx}: {e}"))),
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
