use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// The input ended before a complete codeword was read.
    #[error("truncated input: needed {needed} more bit(s) at position {position}")]
    Truncated { position: usize, needed: usize },

    #[error("value {value} out of range (must be {constraint})")]
    OutOfRange { value: String, constraint: String },

    #[error("invalid argument `{name}`: {reason}")]
    InvalidArgument { name: &'static str, reason: String },

    /// The encoder's domain is the bad event; this input is not in it.
    #[error("no witness: {0}")]
    NoWitness(String),

    #[error("malformed codeword: {0}")]
    Malformed(String),

    #[error("arithmetic overflow computing {0}")]
    Overflow(String),

    #[error("iteration cap of {cap} reached: {context}")]
    IterationCap { cap: u64, context: String },

    #[error("infeasible parameters: {0}")]
    Infeasible(String),
}

impl Error {
    pub fn arg(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidArgument { name, reason: reason.into() }
    }

    pub fn range(value: impl ToString, constraint: impl Into<String>) -> Self {
        Error::OutOfRange { value: value.to_string(), constraint: constraint.into() }
    }
}
