use thiserror::Error;

/// Errors produced by walk construction, evolution and analysis.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum WalkError {
    /// An argument is outside its admissible range.
    #[error("parameter error: {0}")]
    Parameter(String),

    /// A supplied coin or state failed validation (unitarity, normalization).
    #[error("validation error: {0}")]
    Validation(String),

    /// The state does not live on the lattice the operator acts on.
    #[error("geometry mismatch: {0}")]
    Geometry(String),

    /// An eigensolver failed or produced inconsistent output.
    #[error("numeric error: {0}")]
    Numeric(String),

    /// Eigenphase clustering produced a cluster wider than the diameter guard.
    #[error(
        "grouping error: cluster at phase {phase:.6} has diameter {diameter:.3e} \
         exceeding {limit:.3e} ({size} members)"
    )]
    Grouping {
        phase: f64,
        diameter: f64,
        limit: f64,
        size: usize,
    },
}

impl WalkError {
    pub(crate) fn param(msg: impl Into<String>) -> Self {
        WalkError::Parameter(msg.into())
    }

    /// True for errors that stem from floating point behaviour rather than bad input.
    pub fn is_numeric(&self) -> bool {
        matches!(self, WalkError::Numeric(_) | WalkError::Grouping { .. })
    }
}

pub type Result<T> = std::result::Result<T, WalkError>;
