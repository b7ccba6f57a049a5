use thiserror::Error;

/// Errors raised by the physics, modem, channel and detection layers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid geometry: {0}")]
    InvalidGeometry(String),
    #[error("sampling point q_{index} falls near an envelope zero (|C|^2 ratio {ratio:e})")]
    ResonantGeometry { index: isize, ratio: f64 },
    #[error("far-field condition violated: {0}")]
    FarFieldViolation(String),
    #[error("quadrature did not converge after {nodes} nodes (relative change {change:e})")]
    QuadratureNonConvergence { nodes: usize, change: f64 },
    #[error("pattern length {0} is odd; the modulation chain pairs cantilevers")]
    OddLength(usize),
    #[error("length mismatch: expected {expected}, got {actual}")]
    LengthMismatch { expected: usize, actual: usize },
    #[error("malformed header: {0}")]
    MalformedHeader(String),
    #[error("trit block {block} decodes to {value}, outside the 7-bit range")]
    OutOfRangeBlock { block: usize, value: u32 },
    #[error("intensity samples are not normalized by the envelope")]
    NotNormalized,
    #[error("indentation phase gives |sin(2ks)| = {0:e}; no recoverable signal")]
    DegenerateDepth(f64),
    #[error("array size {n} exceeds the brute-force cap of {cap}")]
    TooLarge { n: usize, cap: usize },
    #[error("noise standard deviation is zero")]
    ZeroNoise,
    #[error("detector scale {0:e} is below 1e-6")]
    DegenerateScale(f64),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
