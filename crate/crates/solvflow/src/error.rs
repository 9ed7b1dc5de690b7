use thiserror::Error;

/// Unified error type for the whole crate.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum SolvError {
    #[error("invalid Lie algebra data: {0}")]
    InvalidAlgebra(String),

    #[error("not a solvsoliton: {0}")]
    NotASoliton(String),

    #[error("fitted lambda0 = {0} is not negative")]
    PositiveLambda0(f64),

    #[error("derivation trace must be positive")]
    ZeroTrace,

    #[error("unknown preset '{0}'")]
    UnknownPreset(String),

    /// s0 = 0: the 4D flow divides by s0; scalar-flat data belongs to the
    /// noscal subsystem.
    #[error("scalar-flat parameters (s0 = 0): use the noscal subsystem")]
    ScalarFlat,

    #[error("unstable eigenspace is not 2-dimensional")]
    DegenerateEigenspace,

    #[error("lambda must be negative (got {0})")]
    NonNegativeLambda(f64),

    #[error("noscal subsystem requires -1 < lambda < 0 (got {0})")]
    LambdaOutOfRange(f64),

    #[error("step size underflow at s = {s}")]
    StepSizeUnderflow { s: f64 },

    #[error("trajectory does not start in a capture ball of gamma^S")]
    NotCaptured,

    #[error("failed to capture the stationary point (closest approach {min_dist})")]
    CaptureFailed { min_dist: f64 },

    #[error("theta = {theta} outside the admissible range ({lo}, {hi})")]
    OutsideAdmissibleRange { theta: f64, lo: f64, hi: f64 },

    #[error("trajectory left the invariant region K (worst margin {margin})")]
    LeftK { margin: f64 },

    #[error("w must be positive along the trajectory (w = {w} at s = {s})")]
    NonPositiveW { s: f64, w: f64 },

    #[error("z must be negative along the trajectory (z = {z} at s = {s})")]
    NonNegativeZ { s: f64, z: f64 },

    #[error("z limit ambiguous: terminal z = {z} is far from both candidates")]
    Ambiguous { z: f64 },

    #[error("trajectory too short for rate fitting: {0}")]
    WindowTooShort(String),

    /// A property the library promises along a computed object failed to hold.
    #[error("invariant violated: {0}")]
    InvariantViolated(String),

    #[error("i/o error: {0}")]
    Io(String),

    #[error("parse error: {0}")]
    Parse(String),
}

impl From<std::io::Error> for SolvError {
    fn from(e: std::io::Error) -> Self {
        SolvError::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, SolvError>;
