use thiserror::Error;

/// Errors raised by the correlation-imaging routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum CpiError {
    #[error("invalid geometry: {0}")]
    InvalidGeometry(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// The integrand phase advances more than `limit` radians between
    /// adjacent quadrature nodes somewhere in the integration domain.
    #[error("under-resolved {what}: phase step {increment:.4} rad exceeds {limit:.4} rad")]
    UnderResolved {
        what: &'static str,
        increment: f64,
        limit: f64,
    },

    #[error("refocus overlap too small: {valid} of {total} samples fall inside the acquired range")]
    EmptyOverlap { valid: usize, total: usize },

    #[error("coordinate {value:e} outside axis range [{min:e}, {max:e}]")]
    OutOfRange { value: f64, min: f64, max: f64 },

    #[error("degenerate statistics: {0}")]
    DegenerateStatistics(String),

    #[error("missing feature scale: {0}")]
    MissingFeatureScale(&'static str),
}

impl CpiError {
    /// True for failures of the numerics (sampling, overlap, statistics) as
    /// opposed to bad inputs.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            CpiError::UnderResolved { .. }
                | CpiError::EmptyOverlap { .. }
                | CpiError::DegenerateStatistics(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, CpiError>;
