use thiserror::Error;

/// Errors raised by the numerical layers of the crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    #[error("domain error in {op}: {reason}")]
    Domain { op: &'static str, reason: String },

    /// Adaptive quadrature ran out of subdivisions before reaching tolerance.
    #[error("quadrature failed to converge: estimate {estimate:e} with error {error:e}")]
    Quadrature { estimate: f64, error: f64 },

    /// A root bracket could not be established or refined.
    #[error("numeric failure in {op}: {reason}")]
    Numeric { op: &'static str, reason: String },

    /// An operation needed a setup step that has not run yet.
    #[error("state error in {op}: {reason}")]
    State { op: &'static str, reason: String },

    /// A parameter set lacks a field that the requested theorem needs.
    #[error("missing field `{field}` for {theorem}")]
    MissingField { theorem: String, field: &'static str },

    /// Parameters do not satisfy the theorem hypotheses.
    #[error("inadmissible parameters for {theorem}: violated {violated:?}; use check_conditions first")]
    Inadmissible { theorem: String, violated: Vec<String> },
}

impl Error {
    pub(crate) fn domain(op: &'static str, reason: impl Into<String>) -> Self {
        Error::Domain { op, reason: reason.into() }
    }

    pub(crate) fn numeric(op: &'static str, reason: impl Into<String>) -> Self {
        Error::Numeric { op, reason: reason.into() }
    }

    /// Name of the failing operation, where one is recorded.
    pub fn operation(&self) -> &str {
        match self {
            Error::Domain { op, .. } | Error::Numeric { op, .. } | Error::State { op, .. } => op,
            Error::Quadrature { .. } => "integrate",
            Error::MissingField { .. } | Error::Inadmissible { .. } => "check_conditions",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
