use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("capacity exceeded: {requested} values requested, cap is {cap}")]
    Capacity { requested: u128, cap: u64 },

    #[error("invalid parameter `{field}`: {reason}")]
    InvalidParam { field: &'static str, reason: String },

    #[error("contract violation: {0}")]
    Contract(String),

    #[error("missing value at vertex {0}")]
    MissingValue(String),

    #[error("{0} outside of domain [0, 1]")]
    Domain(f64),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("insufficient depth: need level {needed}, subset is trusted to level {bound}")]
    InsufficientDepth { needed: usize, bound: usize },

    #[error("refused: {0}")]
    Refused(String),

    #[error("parse error in {what}: {reason}")]
    Parse { what: &'static str, reason: String },

    #[error("io: {0}")]
    Io(String),
}

impl Error {
    pub(crate) fn param(field: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParam {
            field,
            reason: reason.into(),
        }
    }

    pub(crate) fn parse(what: &'static str, reason: impl Into<String>) -> Self {
        Error::Parse {
            what,
            reason: reason.into(),
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
