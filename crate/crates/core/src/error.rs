use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("resolution must be a power of two (got {0})")]
    ResolutionNotPowerOfTwo(usize),
    #[error("resolution must be at least 2 (got {0})")]
    ResolutionTooSmall(usize),
    #[error("window must be a positive integer (got {0})")]
    NonPositiveWindow(i64),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("sampled grid does not match Zak grid spec: {0}")]
    GridMismatch(String),
    #[error("invalid function parameters: {0}")]
    InvalidFunction(String),
    #[error("invalid trigonometric polynomial: {0}")]
    InvalidTrigPoly(String),
    #[error("invalid time-frequency system: {0}")]
    InvalidSystem(String),
    #[error("threshold {threshold:e} does not exceed the truncation bound {bound:e}")]
    ThresholdBelowNoise { threshold: f64, bound: f64 },
    #[error("zero refinement failed near {location:?}: {reason}")]
    RefinementFailed { location: Vec<f64>, reason: String },
    #[error("matrix is not Hermitian (defect {0:e})")]
    NotHermitian(f64),
    #[error("linear system is singular")]
    Singular,
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, Error>;
