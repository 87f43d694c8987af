//! Crate-wide error type.

use crate::fir::LinearPhaseType;
use crate::pulses::PulseKind;
use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("bandwidth must satisfy 0 < B < pi, got B = {0} rad")]
    InvalidBandwidth(f64),

    #[error("accuracy must satisfy 0 < delta < 1, got {0}")]
    InvalidDelta(f64),

    #[error("Nyquist band {nb} is not valid for the {pulse} pulse")]
    InvalidBand { pulse: PulseKind, nb: u32 },

    #[error("the {pulse} pulse cannot be equalized with a Type {filter_type} filter")]
    IncompatibleType {
        pulse: PulseKind,
        filter_type: LinearPhaseType,
    },

    #[error("order {order} has the wrong parity for a Type {filter_type} filter")]
    ParityMismatch {
        filter_type: LinearPhaseType,
        order: u32,
    },

    #[error("invalid impulse response: {0}")]
    BadCoefficients(String),

    #[error("design problem has no free parameters")]
    DegenerateProblem,

    #[error("pulse amplitude is not positive on the design band (A({wt:.6}) = {value:.3e})")]
    AmplitudeNotPositive { wt: f64, value: f64 },

    #[error("design did not converge after {iterations} iterations (best delta {best_delta:.3e})")]
    NonConvergence { iterations: usize, best_delta: f64 },

    #[error("order cap {cap} exceeded (best delta {best_delta:.3e} > target)")]
    OrderCapExceeded { cap: u32, best_delta: f64 },

    #[error("no built-in estimate parameters for {pulse}/NB{nb}/Type {filter_type}")]
    UnknownTableRow {
        pulse: PulseKind,
        nb: u32,
        filter_type: LinearPhaseType,
    },

    #[error("grid is empty or degenerate: {0}")]
    EmptyGrid(String),

    #[error("linear program failed: {0}")]
    Lp(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("file format error: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}
