use thiserror::Error;

/// Errors raised by the numerical pipeline.
///
/// Every variant carries a human-readable context string; the variant itself
/// identifies which contract was breached.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("degenerate chart: {0}")]
    DegenerateChart(String),
    #[error("layer thickness violation: {0}")]
    ThicknessViolation(String),
    #[error("quadrature failure: {0}")]
    QuadratureFailure(String),
    #[error("unstable degree window: {0}")]
    UnstableWindow(String),
    #[error("inconclusive fit: {0}")]
    InconclusiveFit(String),
    #[error("nonconvergent tail: {0}")]
    NonconvergentTail(String),
    #[error("capacity did not decay within budget: {0}")]
    NotParabolicNumerically(String),
    #[error("cut-off support violation: {0}")]
    SupportViolation(String),
    #[error("certificate search exhausted: {0}")]
    SearchExhausted(String),
    #[error("eigensolver did not converge: {0}")]
    NoConvergence(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("unsupported for this surface: {0}")]
    Unsupported(String),
    #[error("io error: {0}")]
    Io(String),
}

impl Error {
    /// Stable machine-readable code, used in reports.
    pub fn code(&self) -> &'static str {
        match self {
            Error::DegenerateChart(_) => "degenerate_chart",
            Error::ThicknessViolation(_) => "thickness_violation",
            Error::QuadratureFailure(_) => "quadrature_failure",
            Error::UnstableWindow(_) => "unstable_window",
            Error::InconclusiveFit(_) => "inconclusive_fit",
            Error::NonconvergentTail(_) => "nonconvergent_tail",
            Error::NotParabolicNumerically(_) => "not_parabolic_numerically",
            Error::SupportViolation(_) => "support_violation",
            Error::SearchExhausted(_) => "search_exhausted",
            Error::NoConvergence(_) => "no_convergence",
            Error::InvalidInput(_) => "invalid_input",
            Error::Unsupported(_) => "unsupported",
            Error::Io(_) => "io",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
