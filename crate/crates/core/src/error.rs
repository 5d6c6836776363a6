use std::fmt;

/// Crate-wide error type.
#[derive(Debug)]
pub enum Error {
    /// A precondition on shapes, sizes or parameter ranges was violated.
    InvalidInput(String),
    /// A numeric procedure failed (singular system, divergence, ...).
    Numeric(String),
    /// Underlying file-system error.
    Io(std::io::Error),
    /// A file could not be decoded.
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InvalidInput(msg) => write!(f, "invalid input: {msg}"),
            Error::Numeric(msg) => write!(f, "numeric failure: {msg}"),
            Error::Io(err) => write!(f, "i/o error: {err}"),
            Error::Parse(msg) => write!(f, "parse error: {msg}"),
        }
    }
}

impl std::error::Error for Error {
    fn source(&self) -> Option<&(dyn std::error::Error + 'static)> {
        match self {
            Error::Io(err) => Some(err),
            _ => None,
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(err: std::io::Error) -> Self {
        Error::Io(err)
    }
}

/// Shorthand for `Error::InvalidInput` with a formatted message.
macro_rules! invalid {
    ($($arg:tt)*) => {
        $crate::error::Error::InvalidInput(format!($($arg)*))
    };
}

/// Shorthand for `Error::Numeric` with a formatted message.
macro_rules! numeric {
    ($($arg:tt)*) => {
        $crate::error::Error::Numeric(format!($($arg)*))
    };
}

pub(crate) use {invalid, numeric};
