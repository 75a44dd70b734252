use thiserror::Error;

/// Errors produced anywhere in the library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("matrix is not Hermitian (max asymmetry {0:.3e})")]
    NonHermitian(f64),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("dimension {dim} exceeds cap {cap}")]
    DimensionCap { dim: usize, cap: usize },
    #[error("invalid state: {0}")]
    InvalidState(String),
    #[error("channel is not trace preserving (residual {0:.3e})")]
    NotTracePreserving(f64),
    #[error("map is not completely positive (Choi eigenvalue {0:.3e})")]
    NotCompletelyPositive(f64),
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("target entropy {target} outside [0, {max}]")]
    TargetOutOfRange { target: f64, max: f64 },
    #[error("energy {energy} outside [0, {e_max}]")]
    EnergyOutOfRange { energy: f64, e_max: f64 },
    #[error("curve has no points")]
    EmptyCurve,
    #[error("no convergence: {0}")]
    NoConvergence(String),
}

pub type Result<T> = std::result::Result<T, Error>;
