//! Error type shared by every module of the crate.

use thiserror::Error;

/// Errors raised while building, simulating or validating circuits.
#[derive(Debug, Error)]
pub enum Error {
    #[error("qubit {qubit} is out of range for a circuit of width {width}")]
    QubitOutOfRange { qubit: usize, width: usize },

    #[error("gate touches qubit {0} more than once")]
    QubitCollision(usize),

    #[error("{kind} expects {expected} target(s), got {got}")]
    TargetArity {
        kind: &'static str,
        expected: usize,
        got: usize,
    },

    #[error("width mismatch: expected {expected}, got {got}")]
    WidthMismatch { expected: usize, got: usize },

    #[error("dimension mismatch: expected {expected}x{expected}, got {rows}x{cols}")]
    DimensionMismatch {
        expected: usize,
        rows: usize,
        cols: usize,
    },

    #[error("projection onto ancilla outcome {outcome:#b} has zero probability")]
    ZeroProbability { outcome: usize },

    #[error("{0} is not a power of two; use the padded construction")]
    NotPowerOfTwo(usize),

    #[error("diagonal entry {index} = {value} lies outside [-1, 1]; rescale the system first")]
    DiagonalOutOfRange { index: usize, value: f64 },

    #[error("invalid oscillator system: {0}")]
    InvalidSystem(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("linear combination needs {terms} terms but the selection register holds only {capacity}")]
    SelectionTooSmall { terms: usize, capacity: usize },

    #[error("state preparation does not reproduce the requested weights (deviation {0:.3e})")]
    PreparationMismatch(f64),

    #[error("polynomial parity does not match degree {degree}")]
    ParityMismatch { degree: usize },

    #[error("encoded block is not Hermitian (deviation {0:.3e})")]
    NotHermitian(f64),

    #[error("phase solver did not converge after {iterations} iterations (best error {best_error:.3e})")]
    PhaseSolver { iterations: usize, best_error: f64 },

    #[error("phase sequence reaches error {achieved:.3e}, above the requested {requested:.3e}")]
    PhaseAccuracy { achieved: f64, requested: f64 },

    #[error("success probability {probability:.4} is below the floor {floor}; adjust the amplification schedule")]
    LowSuccess { probability: f64, floor: f64 },

    #[error("zero initial state cannot be normalized")]
    ZeroState,

    #[error("at least two samples are required")]
    TooFewSamples,

    #[error("epsilon {0} must lie in (0, 0.5)")]
    EpsilonOutOfRange(f64),

    #[error("parse error on line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("step at t = {time} failed: {source}")]
    Step {
        time: f64,
        #[source]
        source: Box<Error>,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
