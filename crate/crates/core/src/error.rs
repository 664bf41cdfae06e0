use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid curve: {0}")]
    InvalidCurve(String),

    #[error("invalid domain: {0}")]
    InvalidDomain(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// A function handed to an area integral has a pole inside the closed domain.
    #[error("function has a pole at {re:+.6e}{im:+.6e}i inside the domain")]
    PoleInDomain { re: f64, im: f64 },

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("check failed: {0}")]
    CheckFailed(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
