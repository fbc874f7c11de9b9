use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// Generation parameters that cannot produce a valid mesh.
    #[error("configuration error: {0}")]
    Configuration(String),

    #[error("topology error: {0}")]
    Topology(String),

    #[error("degree error: {0}")]
    Degree(String),

    #[error("mesh quality error: {0}")]
    MeshQuality(String),

    #[error("solver did not converge after {iterations} iterations (relative residual {residual:.3e})")]
    NonConvergence { iterations: usize, residual: f64 },

    #[error("precondition violated: {0}")]
    Precondition(String),

    /// A result failed an internal self-check.
    #[error("internal consistency error: {0}")]
    Consistency(String),

    #[error("checksum mismatch: cochain built against {found}, mesh is {expected}")]
    ChecksumMismatch { expected: String, found: String },

    #[error("invalid input: {0}")]
    Invalid(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
