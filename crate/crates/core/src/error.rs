use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("transition structure is not primitive; no unique equilibrium state")]
    NonPrimitive,
    #[error("power iteration did not converge within {0} iterations")]
    EigenFailure(usize),
    #[error("requested precision of {requested} symbols exceeds coding depth {depth}")]
    DepthExceeded { requested: usize, depth: usize },
    #[error("observation model variant does not support {0}")]
    UnsupportedVariant(&'static str),
    #[error("enumeration of {0} hidden paths exceeds the brute-force limit")]
    TooLarge(f64),
    #[error("every grid point has zero likelihood")]
    AllDegenerate,
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error("config error: {0}")]
    Config(String),
    #[error("data file error at line {line}: {message}")]
    DataFile { line: usize, message: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::Invalid(msg.into())
}
