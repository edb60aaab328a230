use thiserror::Error;

/// Errors produced by the inference routines.
#[derive(Debug, Clone, Error)]
pub enum Error {
    /// A function argument lies outside its mathematical domain.
    #[error("domain error: {0}")]
    Domain(String),

    /// Distribution, prior, or configuration parameters fail validation.
    #[error("invalid parameters: {0}")]
    InvalidParameters(String),

    /// An iterative routine failed to converge.
    #[error("convergence failure: {0}")]
    Convergence(String),

    /// The supplied sample cannot support the requested computation.
    #[error("degenerate sample: {0}")]
    DegenerateSample(String),
}

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;
