use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("degenerate domain: {0}")]
    DegenerateDomain(String),

    #[error("argument out of range: {0}")]
    OutOfRange(String),

    #[error("quadrature failed: {0}")]
    Quadrature(String),

    #[error("sampling failed: {0}")]
    Sampling(String),

    #[error("series evaluation refused: {0}")]
    Series(String),

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn param(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }
}

/// Reject NaN/Inf and values outside `(lo, hi]`.
pub(crate) fn check_range(name: &'static str, value: f64, lo: f64, hi: f64) -> Result<()> {
    if !value.is_finite() || value <= lo || value > hi {
        return Err(Error::param(
            name,
            format!("{value} is outside the allowed range ({lo}, {hi}]"),
        ));
    }
    Ok(())
}

pub(crate) fn check_positive(name: &'static str, value: f64) -> Result<()> {
    check_range(name, value, 0.0, f64::INFINITY).map_err(|_| {
        Error::param(name, format!("{value} must be a finite positive number"))
    })
}
