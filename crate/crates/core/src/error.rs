use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("validation error: {0}")]
    Validation(String),

    #[error("scheme {0} is not supported by this operation")]
    UnsupportedScheme(&'static str),

    #[error("division by zero: {0}")]
    DivisionByZero(&'static str),

    /// Step refinement hit its cap. `difference` is the norm of the change
    /// between the last two refinement levels.
    #[error("propagation did not converge after {refinements} refinements (last difference {difference:e}, tolerance {tolerance:e})")]
    Convergence {
        refinements: usize,
        difference: f64,
        tolerance: f64,
    },

    #[error("fringe amplitude {0:e} is too small to define a phase")]
    DegenerateFringe(f64),

    #[error("infidelity {infidelity:e} at zero relative detuning already exceeds threshold {threshold:e}")]
    NoWindow { infidelity: f64, threshold: f64 },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn validation(msg: impl Into<String>) -> Self {
        Error::Validation(msg.into())
    }
}
