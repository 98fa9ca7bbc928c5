use thiserror::Error;

/// Errors produced anywhere in the library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },

    #[error("invalid Pauli character {0:?} (expected one of I, X, Y, Z)")]
    PauliParse(char),

    #[error("invalid bit character {0:?} (expected 0 or 1)")]
    BitParse(char),

    #[error("no correction registered for syndrome {0}")]
    MissingEntry(String),

    #[error("capacity exceeded: {what} is {got}, cap is {cap}")]
    Capacity { what: String, got: usize, cap: usize },

    #[error("invalid code size {size} for family {family}")]
    InvalidSize { family: String, size: usize },

    #[error("invalid code definition: {0}")]
    InvalidCode(String),

    #[error("probabilities must be nonnegative and sum to 1 (sum = {0})")]
    NotNormalized(f64),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("geometry mismatch: {0}")]
    Geometry(String),

    #[error("config error: {0}")]
    Config(String),

    #[error("replay mismatch: {0}")]
    Replay(String),

    #[error("version mismatch: dump written by {found}, this is {expected}")]
    Version { expected: String, found: String },

    #[error("io error: {0}")]
    Io(String),

    #[error("serialization error: {0}")]
    Serde(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Serde(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub(crate) fn check_dim(expected: usize, got: usize) -> Result<()> {
    if expected == got {
        Ok(())
    } else {
        Err(Error::Dimension { expected, got })
    }
}
