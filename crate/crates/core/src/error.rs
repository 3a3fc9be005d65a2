use num_complex::Complex64;
use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// `|Re(lambda) * h|` exceeded the exponential range guard.
    #[error("overflow guard: |Re(lambda)*h| = {scaled} exceeds {limit}")]
    OverflowGuard { scaled: f64, limit: f64 },

    #[error("non-finite input: {0}")]
    NonFinite(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// A zero sits inside the guard band of a contour; perturb the contour and retry.
    #[error("boundary too close to a zero at {at} (|F| = {modulus:e}, guard = {guard:e})")]
    BoundaryTooClose { at: Complex64, modulus: f64, guard: f64 },

    #[error("subdivision limit reached near {center} (cell winding {count}); suspected multiple root")]
    SubdivisionLimit { center: Complex64, count: i64 },

    #[error("Newton refinement from {seed} failed (residual {residual:e})")]
    NewtonFailed { seed: Complex64, residual: f64 },

    #[error("Rouche margin {margin} is not positive for n = {n}")]
    MarginNonPositive { n: u64, margin: f64 },

    #[error("certification disk holds {count} zeros, expected exactly 1")]
    WindingMismatch { count: i64 },

    #[error("sample {at} lies on the logarithm branch cut")]
    BranchCut { at: Complex64 },

    #[error("dt = {dt} does not divide h = {h} into at least 50 steps")]
    GridMismatch { h: f64, dt: f64 },

    #[error("history is not finite on [-h, 0]")]
    NonFiniteHistory,

    #[error("need at least {required} envelope peaks in the fit window, found {found}")]
    TooFewPeaks { found: usize, required: usize },

    #[error("no sign change of U_n on (n, n+1) for n = {n}")]
    NoBracket { n: u64 },
}
