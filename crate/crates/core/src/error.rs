use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid polynomial '{0}'")]
    InvalidPolynomial(String),

    #[error("invalid code: {0}")]
    InvalidCode(String),

    #[error("catastrophic code: {0}")]
    Catastrophic(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("config error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
