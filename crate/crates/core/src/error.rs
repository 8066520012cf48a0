use thiserror::Error;

/// Errors raised across the crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("signature mismatch: {0}")]
    Signature(String),

    #[error("variable index {index} out of range (have {len} variables)")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("invalid exponent: {0}")]
    InvalidExponent(String),

    #[error("invalid signature: {0}")]
    InvalidSignature(String),

    #[error("point outside domain: {0}")]
    Domain(String),

    #[error("transform not applicable: {0}")]
    Transform(String),

    #[error("depth guard exhausted at max_depth = {0}")]
    DepthExhausted(usize),

    #[error("verification failed on branch {branch}: {reason}")]
    Verification { branch: String, reason: String },

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("radius not certified: {0}")]
    RadiusNotCertified(String),

    #[error("rank profile inconsistent: {0}")]
    Rank(String),

    #[error("insufficient degree: {0}")]
    InsufficientDegree(String),

    #[error("precondition violated: {0}")]
    Precondition(String),
}

pub type Result<T> = std::result::Result<T, Error>;
