use thiserror::Error;

use crate::cover::Violation;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid cover instance: {} violation(s), first: {}", .0.len(), .0[0])]
    InvalidInstance(Vec<Violation>),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("colouring is not proper: colours {0} and {1} conflict")]
    ImproperColouring(crate::ColourRef, crate::ColourRef),

    #[error("gave up after {attempts} attempts: {reason}")]
    AttemptsExhausted { attempts: usize, reason: String },

    #[error("malformed input: {0}")]
    Format(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
