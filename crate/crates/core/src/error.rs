use thiserror::Error;

use crate::quantum::DensityMatrix;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid dimension {0}: every subsystem needs at least two levels")]
    InvalidDimension(usize),

    #[error("total Hilbert-space dimension {0} exceeds the dense limit of {max}", max = crate::quantum::MAX_DIMENSION)]
    DimensionTooLarge(usize),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("operands live on different Hilbert spaces")]
    SpaceMismatch,

    #[error("subsystem index {index} out of range for a space with {len} subsystems")]
    InvalidSubsystem { index: usize, len: usize },

    #[error("subsystem selection must not be empty")]
    EmptySelection,

    #[error("state vector is not normalized (norm {0})")]
    NotNormalized(f64),

    #[error("matrix is not a valid density matrix: {0}")]
    InvalidState(String),

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("value {value} lies outside the calibrated range [{lo}, {hi}]; refusing to extrapolate")]
    OutOfRange { value: f64, lo: f64, hi: f64 },

    #[error("matrix is singular or numerically ill-conditioned")]
    Singular,

    #[error("integration failed at t = {time:e} s (step {step:e} s): {reason}")]
    Integration { time: f64, step: f64, reason: String },

    #[error("exponential fit failed: {0}")]
    Fit(String),

    #[error("degenerate training data: {0}")]
    DegenerateData(String),

    #[error("optimizer did not converge after {iterations} iterations (objective {objective:e})")]
    NotConverged {
        iterations: usize,
        objective: f64,
        best: Box<DensityMatrix>,
    },

    #[error("configuration error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn param(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }
}
