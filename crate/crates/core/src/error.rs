use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("pole of the Gamma function at x = {0}")]
    Pole(f64),

    #[error("invalid dimension {0}: need n >= 2")]
    InvalidDimension(usize),

    #[error("invalid quadrature level {0}: need level >= 1")]
    InvalidLevel(usize),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("zero vector where a nonzero direction is required")]
    ZeroVector,

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("vector x is not orthogonal to u (|<u,x>| = {0:e})")]
    NotOrthogonal(f64),

    #[error("insufficient quadrature level {level} for harmonic degree {lmax}")]
    InsufficientLevel { level: usize, lmax: usize },

    #[error("degenerate multiplier at degree {l}: |t_l| = {value:e}")]
    DegenerateMultiplier { l: usize, value: f64 },

    #[error("finite-difference step underflow (h = {0:e})")]
    StepUnderflow(f64),

    #[error("degenerate convex hull: {0}")]
    DegenerateHull(String),

    #[error("invalid density: {0}")]
    InvalidDensity(String),
}

impl Error {
    /// True for errors caused by bad inputs rather than numerical breakdown.
    pub fn is_config(&self) -> bool {
        matches!(
            self,
            Error::InvalidDimension(_)
                | Error::InvalidLevel(_)
                | Error::DimensionMismatch { .. }
                | Error::Precondition(_)
                | Error::NotOrthogonal(_)
                | Error::InsufficientLevel { .. }
                | Error::InvalidDensity(_)
        )
    }
}
