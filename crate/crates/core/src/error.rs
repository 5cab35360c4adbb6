use alloc::string::String;
use core::fmt;

/// Errors reported by the core routines.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// An argument lies outside the documented domain of an operation.
    Domain(String),
    /// An instance is larger than an exhaustive oracle accepts.
    TooLarge {
        what: &'static str,
        limit: usize,
        got: usize,
    },
    /// An operation was invoked in a state where it is not defined.
    InvalidState(String),
}

pub type Result<T> = core::result::Result<T, Error>;

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn state(msg: impl Into<String>) -> Self {
        Error::InvalidState(msg.into())
    }
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Domain(m) => write!(f, "domain error: {m}"),
            Error::TooLarge { what, limit, got } => {
                write!(f, "instance too large: {what} = {got} exceeds {limit}")
            }
            Error::InvalidState(m) => write!(f, "invalid state: {m}"),
        }
    }
}

impl core::error::Error for Error {}
