//! Error type shared by all modules.

use thiserror::Error;

/// Errors reported by the toolkit.
#[derive(Debug, Error)]
pub enum Error {
    #[error("matrix is not square ({rows}x{cols})")]
    NonSquareMatrix { rows: usize, cols: usize },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("matrix dimension {dim} exceeds the dense-solver cap of {cap}")]
    DimensionCap { dim: usize, cap: usize },

    #[error("eigenvalue iteration did not converge after {iterations} sweeps")]
    EigenNonConvergence { iterations: usize },

    #[error("weight exponent must satisfy alpha > -1, got {alpha}")]
    InvalidAlpha { alpha: f64 },

    #[error("invalid symbol: Im(c0) - sum|c_k| = {epsilon} is not positive")]
    InvalidSymbol { epsilon: f64 },

    #[error("term frequency must be positive, got gamma = {gamma}")]
    InvalidFrequency { gamma: f64 },

    #[error("enclosure is not compactly contained in the upper half-plane (Im center {im_center} <= radius {radius})")]
    InfeasibleEnclosure { im_center: f64, radius: f64 },

    #[error("shift {t0} is not commensurable with the grid spacing {dt}; nearest multiple is {suggestion}")]
    IncommensurableShift { t0: f64, dt: f64, suggestion: f64 },

    #[error("frequency ratio {ratio} has no rational approximation p/q with q <= {cap} at tolerance {tol}")]
    IncommensurableFrequencies { ratio: f64, cap: u64, tol: f64 },

    #[error("grid is not uniformly spaced; shift operators require a uniform grid")]
    NonUniformGrid,

    #[error("series order cap {cap} exceeded: contraction factor delta = {delta} is too close to 1")]
    SeriesOrderCap { cap: usize, delta: f64 },

    #[error("tail bound requires delta in [0, 1), got {delta}")]
    InvalidDelta { delta: f64 },

    #[error("evaluation point is a pole of the map")]
    PoleInput,

    #[error("point must lie in the open upper half-plane (Im z = {im} <= 0)")]
    NotInUpperHalfPlane { im: f64 },

    #[error("range point {point} has non-positive imaginary part; symbol hypothesis violated")]
    RangePointNotInUpperHalfPlane { point: String },

    #[error("occupancy grid came out empty; boundary sampling is too sparse for epsilon and the window schedule")]
    EmptyRange,

    #[error("empty point set passed to a set-distance computation")]
    EmptyPointSet,

    #[error("polynomial is not a self-map of the disk: boundary maximum {max} exceeds 1")]
    NotASelfMap { max: f64 },

    #[error("bump support [{lo}, {hi}] exceeds the grid span ({t_first}, {t_last}]")]
    BumpExceedsGrid {
        lo: f64,
        hi: f64,
        t_first: f64,
        t_last: f64,
    },

    #[error("spectrum t-grid too short: 2*pi*t_max*min Im z = {product} < {required}, curve tails would not reach 0")]
    SpectrumGridTooShort { product: f64, required: f64 },

    #[error("reproducing-constant calibration inconsistent across test functions (spread {spread})")]
    CalibrationInconsistent { spread: f64 },

    #[error("{0}")]
    Domain(String),
}

/// Convenience alias used throughout the crate.
pub type Result<T> = std::result::Result<T, Error>;
