use thiserror::Error;

use crate::quadrature::IntegralResult;

/// Errors raised by evaluation, quadrature and linear algebra.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An expression or argument is outside the domain where it is defined.
    #[error("domain error: {0}")]
    Domain(String),
    /// Quadrature hit its work limit before meeting the tolerance.
    /// The best estimate obtained so far is kept.
    #[error(
        "tolerance not met: value {} with error estimate {:.3e} after {} panels",
        best.value, best.error_estimate, best.panels_used
    )]
    Tolerance { best: Box<IntegralResult> },
    /// A linear-algebra step failed (for instance a Gram matrix that is not PSD).
    #[error("numerical error: {0}")]
    Numerical(String),
}

pub type Result<T> = std::result::Result<T, Error>;
