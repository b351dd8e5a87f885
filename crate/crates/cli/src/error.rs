use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("invalid input: {0}")]
    Validation(String),
    #[error("inconsistent measurements: {0}")]
    Inconsistent(String),
    #[error("i/o failure: {0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Validation(_) => 1,
            CliError::Inconsistent(_) => 2,
            CliError::Io(_) => 3,
        }
    }
}

impl From<idi_phase::Error> for CliError {
    fn from(e: idi_phase::Error) -> Self {
        use idi_phase::Error as E;
        match e {
            E::ContradictoryMeasurements { .. }
            | E::AllHypothesesPruned
            | E::InsufficientCoverage { .. }
            | E::CosOutOfRange { .. }
            | E::OutOfRange(_)
            | E::DegenerateInput(_) => CliError::Inconsistent(e.to_string()),
            _ => CliError::Validation(e.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Io(e.to_string())
    }
}
