use num_complex::Complex64;
use thiserror::Error;

pub type Result<T, E = NuError> = std::result::Result<T, E>;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum NuError {
    #[error("pole hit at z = {z} (|denominator| = {modulus:e})")]
    PoleHit { z: Complex64, modulus: f64 },

    #[error("z = 1 is not in the evaluation domain of a delay plant")]
    DomainError,

    #[error("delay plants cannot be converted to disk-rational form")]
    UnsupportedDelay,

    #[error("delay is not allowed here (the classical metric needs rational plants)")]
    DelayNotAllowed,

    #[error("spectral polynomial has a root on the imaginary axis at s = {root}")]
    AxisRoot { root: Complex64 },

    #[error("factors are not coprime: corona gap {gap:e} is below the floor")]
    NotCoprime { gap: f64 },

    #[error("curve passes through zero at radius {radius}, angle {angle} (|f| = {modulus:e})")]
    CurveThroughZero {
        radius: f64,
        angle: f64,
        modulus: f64,
    },

    #[error("argument increments stay above pi/2 after {depth} refinements")]
    NeedsRefinement { depth: u32 },

    #[error("sample count {len} is not a power of two")]
    LengthNotPowerOfTwo { len: usize },

    #[error("closed-loop denominator vanishes identically")]
    DegeneratePair,

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("invalid input: {0}")]
    Validation(String),

    #[error("parse error: {0}")]
    Parse(String),
}

impl NuError {
    pub(crate) fn validation(msg: impl Into<String>) -> Self {
        NuError::Validation(msg.into())
    }
}
