use thiserror::Error;

/// Errors produced across the crate.
#[derive(Debug, Error)]
pub enum Error {
    /// An argument lies outside the domain where an operation is defined.
    #[error("domain error: {0}")]
    Domain(String),

    /// A feasible curve could not be built within the search brackets.
    #[error("construction failed: {0}")]
    Construction(String),

    /// The request would exceed the supported enumeration size.
    #[error("resource limit: {0}")]
    Resource(String),

    /// Malformed input file or spec string.
    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}
