use thiserror::Error;

/// Failures grouped by the exit status they map to.
#[derive(Debug, Error)]
pub enum Failure {
    #[error("invalid configuration: {0}")]
    Validation(String),
    #[error("solver failure: {0}")]
    Solver(String),
    #[error("verification failed: {0}")]
    Verification(String),
}

impl Failure {
    pub fn exit_code(&self) -> u8 {
        match self {
            Failure::Validation(_) => 2,
            Failure::Solver(_) => 3,
            Failure::Verification(_) => 4,
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Solver(format!("i/o: {e}"))
    }
}

pub type Outcome<T> = Result<T, Failure>;

/// Core errors raised while reading input are validation problems; the rest
/// come from the numerics.
pub fn input(e: biorth_core::Error) -> Failure {
    Failure::Validation(e.to_string())
}

pub fn numeric(e: biorth_core::Error) -> Failure {
    Failure::Solver(e.to_string())
}
