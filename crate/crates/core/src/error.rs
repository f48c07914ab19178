use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("singular leading coefficient: {0}")]
    Singular(String),
    #[error("unsupported order: {0}")]
    UnsupportedOrder(String),
    #[error("coefficient outside computed box: {0}")]
    OutsideBox(String),
    #[error("zero integrity failure in block [{lo}, {hi}]: expected {expected} zeros, found {found}")]
    Integrity {
        lo: f64,
        hi: f64,
        expected: usize,
        found: usize,
    },
    #[error("malformed input at line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("i/o: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}
