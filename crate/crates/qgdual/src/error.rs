use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("q must be a positive finite number, got {0}")]
    InvalidQ(f64),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("out of domain: {0}")]
    Domain(String),
    #[error("division by zero")]
    DivisionByZero,
    #[error("division is not exact: {0}")]
    Inexact(String),
    #[error("operator is not nilpotent within {0} steps")]
    NotNilpotent(usize),
    #[error("series did not converge: {0}")]
    Divergence(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
