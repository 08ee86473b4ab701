use thiserror::Error;

/// Failures of a CLI run, each mapped to an exit code.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error{}: {message}", position(*line, *column))]
    Config { line: Option<usize>, column: Option<usize>, message: String },

    #[error("numeric failure in {operation}: {message}")]
    Numeric { operation: String, message: String },

    #[error("cannot write output: {0}")]
    Io(#[from] std::io::Error),

    /// A golden expectation or self-test check did not hold.
    #[error("check failed: {0}")]
    Check(String),
}

fn position(line: Option<usize>, column: Option<usize>) -> String {
    match (line, column) {
        (Some(l), Some(c)) => format!(" at line {l}, column {c}"),
        (Some(l), None) => format!(" at line {l}"),
        _ => String::new(),
    }
}

impl CliError {
    pub fn config(message: impl Into<String>) -> Self {
        CliError::Config { line: None, column: None, message: message.into() }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config { .. } => 2,
            CliError::Numeric { .. } => 3,
            CliError::Io(_) | CliError::Check(_) => 1,
        }
    }
}

impl From<radlab::Error> for CliError {
    fn from(e: radlab::Error) -> Self {
        match e {
            // schema problems in the parameters are configuration errors
            radlab::Error::MissingField { .. } | radlab::Error::Inadmissible { .. } => CliError::config(e.to_string()),
            other => CliError::Numeric { operation: other.operation().to_string(), message: other.to_string() },
        }
    }
}
