//! Error type shared across the library.
//!
//! Most operations validate their inputs up front and return
//! [`Error::InvalidArgument`] on malformed data rather than panicking, so the
//! CLI can map failures onto stable exit codes. The variants mirror the four
//! failure families the tools distinguish: bad arguments or configs, requests
//! for exact computation on objects that only support sampling, size or
//! budget ceilings, and violations of a runtime contract (gradient norm
//! bounds, bandit feedback protocol).

use crate::dynamics::SolveResult;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// Malformed input: dimension mismatches, out-of-range parameters, probabilities
    /// that do not sum to one, and similar precondition failures.
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// Exact evaluation was requested for an object that cannot provide it, for
    /// example the exact risk of a sampler-backed distribution or a smooth loss
    /// routed through the table-loss path.
    #[error("exact evaluation unsupported: {0}")]
    UnsupportedExact(String),

    /// A size cap was exceeded (matrix entries for the minimax solver, feature
    /// counts for enumerated hypothesis classes, search ceilings).
    #[error("resource limit: {0}")]
    ResourceLimit(String),

    /// A declared runtime contract was broken, e.g. a first-order oracle returned
    /// a vector above its own norm bound. The solvers abort instead of clamping.
    #[error("contract violation: {0}")]
    ContractViolation(String),

    /// Bandit feedback did not match the announced observe set, or feedback was
    /// supplied before any action was announced.
    #[error("feedback protocol violation: {0}")]
    ProtocolViolation(String),

    /// A config document failed to parse or had a bad field value.
    #[error("config error in field `{field}`: {message}")]
    Config { field: String, message: String },

    /// The sample budget ran out mid-run. Carries everything solved so far,
    /// including the transcript when one was requested.
    #[error("sample budget exhausted after {} rounds", partial.rounds)]
    BudgetExhausted { partial: Box<SolveResult> },

    /// Serialization or parsing of an instance document failed.
    #[error("instance format error at line {line}: {message}")]
    InstanceFormat { line: usize, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }

    /// Process exit code the CLI maps this error onto.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config { .. } | Error::InvalidArgument(_) | Error::InstanceFormat { .. } => 2,
            Error::ContractViolation(_) | Error::ProtocolViolation(_) => 3,
            Error::ResourceLimit(_) | Error::BudgetExhausted { .. } => 4,
            _ => 1,
        }
    }
}
