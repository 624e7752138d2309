use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("modulus mismatch: {0} vs {1}")]
    ModulusMismatch(u32, u32),
    #[error("unsupported modulus {0}: must be a prime <= 251")]
    BadModulus(u32),
    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },
    #[error("matrix is not invertible")]
    NotInvertible,
    #[error("vector is not in the span of the basis")]
    NotInSpan,
    #[error("invalid presentation: {0}")]
    InvalidPresentation(String),
    #[error("unknown id {0}")]
    UnknownId(u32),
    #[error("presentations are not compatible: {0}")]
    IncompatiblePresentations(String),
    #[error("presentations are not sigma-compatible: {0}")]
    NotSigmaCompatible(String),
    #[error("no compatibility bijection exists")]
    Infeasible,
    #[error("size limit exceeded: {0}")]
    SizeLimitExceeded(String),
    #[error("invalid matching: {0}")]
    InvalidMatching(String),
    #[error("invalid instance: {0}")]
    InvalidInstance(String),
    #[error("invalid solution: {0}")]
    SolutionInvalid(String),
    #[error("parse error: {0}")]
    Parse(String),
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Parse(e.to_string())
    }
}
