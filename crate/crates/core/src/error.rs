use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("variable count mismatch: expected {expected}, found {found}")]
    NvarsMismatch { expected: usize, found: usize },

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("parse error at {pos}: {msg}")]
    Parse { pos: usize, msg: String },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("matrix is not symmetric")]
    NotSymmetric,

    #[error("polynomial is not homogeneous of degree {0}")]
    NotHomogeneous(u32),

    #[error("malformed certificate: {0}")]
    MalformedCertificate(String),

    #[error("input is not positive definite at sampled point {point}")]
    NotPositiveDefinite { point: String },

    #[error("input is not positive semidefinite: {0}")]
    NotPsd(String),

    #[error("construction failed: {0}")]
    Construction(String),

    #[error("{0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
