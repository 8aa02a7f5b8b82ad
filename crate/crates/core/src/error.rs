use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid degree combination: {0}")]
    InvalidDegrees(String),
    #[error("code construction failed: {0}")]
    ConstructionFailed(String),
    #[error("invalid code: {0}")]
    InvalidCode(String),
    #[error("malformed alist: {0}")]
    Alist(String),
    #[error("length mismatch: expected {expected}, got {actual}")]
    LengthMismatch { expected: usize, actual: usize },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("distribution is not normalized (sum = {0})")]
    NotNormalized(f64),
    #[error("invalid table: {0}")]
    InvalidTable(String),
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("atom count {0} exceeds the configured cap")]
    AtomCap(usize),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}
