use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("{0}")]
    Usage(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Numerical(_) => 3,
            CliError::Usage(_) | CliError::Io(_) => 1,
        }
    }
}

impl From<birqi::Error> for CliError {
    fn from(e: birqi::Error) -> Self {
        use birqi::Error as E;
        match e {
            E::DimensionMismatch(_)
            | E::NotSquare { .. }
            | E::NotHermitian { .. }
            | E::InvalidModel(_)
            | E::IndexOutOfRange { .. } => CliError::Config(e.to_string()),
            E::NonPositiveDuration(_) | E::NegativeTime(_) | E::NegativeBeta(_) | E::InvalidWeights(_) => {
                CliError::Usage(e.to_string())
            }
            E::InvalidState(_)
            | E::ConcurrenceOutOfRange(_)
            | E::NumericalDrift { .. }
            | E::Numerical(_) => CliError::Numerical(e.to_string()),
        }
    }
}
