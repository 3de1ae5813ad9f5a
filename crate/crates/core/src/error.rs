use thiserror::Error;

/// Errors produced by the phase-time library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("quadrature did not converge for {what}: {panels} panels, estimated error {error:e}")]
    NonConvergence {
        what: &'static str,
        panels: usize,
        error: f64,
    },

    #[error("vanishing denominator in {0}")]
    VanishingDenominator(&'static str),

    #[error("{0}")]
    Divergent(&'static str),

    #[error("density maximum at tau = {tau_peak} lies on the search window boundary [{tau_min}, {tau_max}]")]
    WindowHit { tau_peak: f64, tau_min: f64, tau_max: f64 },

    #[error("config line {line}: {message}")]
    Config { line: usize, message: String },

    #[error("csv line {line}: {message}")]
    Csv { line: usize, message: String },
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }

    /// True for failures of the numerics (as opposed to bad input).
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::NonConvergence { .. }
                | Error::VanishingDenominator(_)
                | Error::Divergent(_)
                | Error::WindowHit { .. }
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
