use thiserror::Error;

/// Every failure mode surfaced by the library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("precision loss: achieved error estimate {achieved:e}")]
    PrecisionLoss { achieved: f64 },
    #[error("unsupported derivative order {0} (max 8)")]
    UnsupportedOrder(usize),
    #[error("parameter error: {0}")]
    Parameter(String),
    #[error("resource limit exceeded: {0}")]
    Resource(String),
    #[error("hypothesis violated: {what} derivative of order {order} at {point}")]
    Hypothesis { what: String, order: usize, point: f64 },
    #[error("degenerate input: {0}")]
    Degenerate(String),
    #[error("insufficient data: {0}")]
    InsufficientData(String),
    #[error("io error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
