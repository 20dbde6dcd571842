use thiserror::Error;

/// Errors raised by the numerical routines.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid size: {0}")]
    InvalidSize(String),
    #[error("dimension {0} out of range ({1})")]
    DimensionOutOfRange(usize, &'static str),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("non-finite input at index {0}")]
    NonFiniteInput(usize),
    #[error("shape mismatch: expected {expected}, got {got}")]
    ShapeMismatch { expected: usize, got: usize },
    #[error("zero frequency is a pole of the multiplier")]
    ZeroFrequency,
    #[error("nonpositive time t = {0}")]
    NonpositiveTime(f64),
    #[error("quadrature failure: {0}")]
    QuadratureFailure(String),
    #[error("method disagreement: max relative difference {0:.3e}")]
    MethodDisagreement(f64),
    #[error("alpha = {alpha} outside (0, {n})")]
    AlphaOutOfRange { alpha: f64, n: usize },
    #[error("nonpositive value {value:e} at r = {r} inside fit window")]
    NonpositiveValues { r: f64, value: f64 },
    #[error("fit window [{0}, {1}] is outside the trusted region")]
    WindowOutsideTrust(f64, f64),
    #[error("spectral tail energy fraction {0:.3e} exceeds threshold")]
    SpectralTailTooLarge(f64),
    #[error("negative base {value:e} at index {index} raised to non-integer power")]
    NegativeBaseNonIntegerPower { index: usize, value: f64 },
    #[error("grid kind not supported here: {0}")]
    UnsupportedGrid(&'static str),
    #[error("test function support violates the trusted region")]
    TestSupportViolation,
    #[error("field is flat, no usable maximum")]
    FlatField,
    #[error("plane x = {0} does not reflect grid nodes onto grid nodes")]
    OffLatticePlane(f64),
    #[error("region contains no grid nodes")]
    RegionEmpty,
    #[error("interpolation failure: {0}")]
    InterpolationFailure(String),
    #[error("iteration diverged at step {0}")]
    Divergence(usize),
    #[error("i/o failure: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;
