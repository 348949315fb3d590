use thiserror::Error;

/// Errors raised by the certification pipeline and the matrix checks.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("no sign change on [{lo}, {hi}]: f(lo) = {flo}, f(hi) = {fhi}")]
    NoSignChange { lo: f64, hi: f64, flo: f64, fhi: f64 },

    /// The derivative of `j` does not change sign inside the `±T` window
    /// around an approximate critical point, so the triple cannot be certified.
    #[error("root validation failed near x = {root}: {reason}")]
    RootValidationFailed { root: f64, reason: &'static str },

    #[error("domain violation: {0}")]
    DomainViolation(String),

    #[error("argument order: expected {lo} <= {hi}")]
    ArgumentOrder { lo: f64, hi: f64 },

    #[error("grid node c = {c} is degenerate (C_k = 10)")]
    DegenerateNode { c: f64 },

    #[error("coverage gap: {0}")]
    CoverageGap(String),

    #[error("grid is not strictly increasing at index {index}")]
    UnsortedGrid { index: usize },

    #[error("matrix is not Hermitian (relative asymmetry {asymmetry:e})")]
    NotHermitian { asymmetry: f64 },

    #[error("bad parameter: {0}")]
    BadParameter(String),

    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),

    #[error("zero denominator in ratio")]
    ZeroDenominator,

    #[error("{path}: {message}")]
    Io { path: String, message: String },

    #[error("operator norm {norm} is not below pi")]
    SpectralRadiusTooLarge { norm: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;
