use thiserror::Error;

/// Errors produced anywhere in the library.
#[derive(Debug, Error)]
pub enum Error {
    /// A structural invariant of an election or profile failed.
    #[error("invariant violation: {0}")]
    InvariantViolation(String),

    /// Malformed input while reading an election file.
    #[error("parse error: {0}")]
    ParseError(String),

    /// An algorithm parameter is outside its admissible range.
    #[error("parameter error: {0}")]
    ParameterError(String),

    /// The requested rule cannot be evaluated on the given data.
    #[error("rule inapplicable: {0}")]
    RuleInapplicable(String),

    /// Requested number of candidates does not match the algorithm.
    #[error("dimension error: {0}")]
    DimensionError(String),

    /// Instance exceeds the documented small-instance envelope.
    #[error("size limit exceeded: {0}")]
    SizeLimit(String),

    /// Without-replacement draw larger than the population.
    #[error("sample budget {budget} exceeds population {population}")]
    BudgetExceedsPopulation { budget: u64, population: u64 },

    /// Iterative search drove its working parameter below the configured floor.
    #[error("iteration cap reached: {0}")]
    IterationCap(String),

    /// A sampled ranking is not single-peaked with respect to the reference order.
    #[error("profile not single-peaked: {0}")]
    NotSinglePeaked(String),

    /// Requested planted margin cannot be realized by the instance family.
    #[error("infeasible construction: {0}")]
    Infeasible(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Process exit code for the CLI: 2 for parameter errors, 3 for
    /// invariant/parse failures, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::ParameterError(_) | Error::DimensionError(_) => 2,
            Error::InvariantViolation(_) | Error::ParseError(_) => 3,
            _ => 1,
        }
    }
}
