use thiserror::Error;

/// Errors raised by the engine.
///
/// The variants map onto the failure classes a caller may want to react to
/// differently: bad input (`Domain`, `Lookup`, `Parse`), a violated
/// precondition of an otherwise well-formed call, numerical breakdown, and
/// resource exhaustion (coset tables that outgrow their bound).
#[derive(Error, Debug)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("numeric error: {0}")]
    Numeric(String),
    #[error("resource limit exceeded: {0}")]
    Resource(String),
    #[error("unknown name: {0}")]
    Lookup(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Short machine-readable class name.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Domain(_) => "domain",
            Error::Precondition(_) => "precondition",
            Error::Numeric(_) => "numeric",
            Error::Resource(_) => "resource",
            Error::Lookup(_) => "lookup",
            Error::Parse(_) => "parse",
            Error::Json(_) => "json",
        }
    }

    pub fn is_resource(&self) -> bool {
        matches!(self, Error::Resource(_))
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

macro_rules! domain {
    ($($arg:tt)*) => { $crate::error::Error::Domain(format!($($arg)*)) };
}
macro_rules! precondition {
    ($($arg:tt)*) => { $crate::error::Error::Precondition(format!($($arg)*)) };
}
macro_rules! numeric {
    ($($arg:tt)*) => { $crate::error::Error::Numeric(format!($($arg)*)) };
}
pub(crate) use {domain, numeric, precondition};
