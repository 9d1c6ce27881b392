use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("field mismatch: {0}")]
    FieldMismatch(String),
    #[error("inversion of zero")]
    DivisionByZero,
    #[error("invalid field: {0}")]
    InvalidField(String),
    #[error("{what} = {value} exceeds cap {cap}")]
    CapExceeded { what: String, value: u64, cap: u64 },
    #[error("integrality failure: {0}")]
    Integrality(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("not a Dieudonne element: {0}")]
    NotDieudonne(String),
    #[error("ill-defined structure: {0}")]
    IllDefined(String),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn cap(what: impl Into<String>, value: u64, cap: u64) -> Self {
        Error::CapExceeded {
            what: what.into(),
            value,
            cap,
        }
    }

    pub fn is_cap(&self) -> bool {
        matches!(self, Error::CapExceeded { .. })
    }
}
