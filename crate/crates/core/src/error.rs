use thiserror::Error;

use crate::tensorcore::Bipartition;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid arity: {0}")]
    InvalidArity(String),

    #[error("state is not normalized (norm = {norm})")]
    Normalization { norm: f64 },

    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("operator is not Hermitian (max |M - M†| = {deviation:e})")]
    Hermiticity { deviation: f64 },

    #[error("vectors span a zero-dimensional space")]
    EmptySpan,

    #[error("state is not entangled across cut {0}")]
    NotEntangledAcrossCut(Bipartition),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("certificate failure: {0}")]
    CertificateFailure(String),

    #[error("target is not genuinely multipartite entangled: {0}")]
    NotGme(String),

    #[error("size limit exceeded: dimension {dim} > {limit}")]
    Size { dim: usize, limit: usize },

    #[error("witness does not detect its target (expectation {expectation} >= 0)")]
    NotDetecting { expectation: f64 },

    #[error("inconsistent inputs: {0}")]
    Inconsistent(String),

    #[error("parse error at position {position}: {message}")]
    Parse { position: usize, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
