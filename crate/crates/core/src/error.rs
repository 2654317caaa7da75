use thiserror::Error;

/// Errors raised by polygon construction, kernel evaluation and the oracles.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid polygon: {0}")]
    InvalidPolygon(String),

    #[error("argument out of domain: {0}")]
    Domain(String),

    #[error("index {index} out of range 0..{len}")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("order {order} out of supported range {min}..={max}")]
    OrderOutOfRange { order: i32, min: i32, max: i32 },

    #[error("integer overflow evaluating {0}")]
    Overflow(String),

    #[error("quadrature did not converge: estimate {estimate}, error {error}")]
    Quadrature { estimate: f64, error: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;
