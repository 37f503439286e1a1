use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    /// Parameters or arguments outside the documented domain of an operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// Grid too coarse for the requested number of Volterra iterations.
    #[error("grid size {given} is below the resolution floor; need at least {required} points for {iterations} iterations")]
    ResolutionFloor {
        given: u64,
        required: u64,
        iterations: u32,
    },

    /// An internal cross-check failed; this signals a transcription or
    /// arithmetic inconsistency, not a user error.
    #[error("internal consistency failure: {0}")]
    Internal(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
