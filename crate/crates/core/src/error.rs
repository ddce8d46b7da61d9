use thiserror::Error;

use crate::algebra::{Operation, ValidationReport};

/// Errors raised by the workbench. Negative mathematical answers are never
/// errors; they are ordinary return values.
#[derive(Debug, Error)]
pub enum Error {
    #[error("malformed tables: {0}")]
    MalformedTables(String),

    #[error("axiom violation: {0}")]
    AxiomViolation(ValidationReport),

    #[error("connective {op} is not in the signature of {algebra}")]
    UnsupportedConnective { op: Operation, algebra: String },

    #[error("constant 0 is used but {0} is unbounded")]
    UnsupportedBottom(String),

    #[error("target signature is not contained in the signature of {0}")]
    SignatureNotShrinking(String),

    #[error("signature mismatch: {0}")]
    SignatureMismatch(String),

    #[error("ordinal sum does not exist at junction {junction}: lower top is join-reducible and the upper summand has no least element")]
    SumDoesNotExist { junction: usize },

    #[error("element {0} is not a node")]
    NotANode(String),

    #[error("{0} is not a Heyting algebra")]
    NotHeyting(String),

    #[error("{what} needs {needed} but the cap is {limit}")]
    SizeLimitExceeded {
        what: &'static str,
        needed: usize,
        limit: usize,
    },

    #[error("variety {0} is not pseudocomplemented")]
    NotPseudocomplemented(String),

    #[error("{algebra} is not in the variety {variety}")]
    NotInVariety { algebra: String, variety: String },

    #[error("{0} is not a hoop (divisible, 0-free)")]
    NotAHoop(String),

    #[error("{0} is not a bounded hoop")]
    NotBoundedHoop(String),

    #[error("homomorphism is not surjective")]
    NotSurjective,

    #[error("element {0} is not idempotent")]
    NotIdempotentElement(String),

    #[error("the 0-fiber of the surjection is not {{0}}")]
    ZeroFiberNotTrivial,

    #[error("not a homomorphism: {0}")]
    NotAHomomorphism(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("internal consistency check failed: {0}")]
    Inconsistent(String),

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// True for the cap-exceeded family, which callers may want to report
    /// as "unknown" rather than as a failure.
    pub fn is_size_limit(&self) -> bool {
        matches!(self, Error::SizeLimitExceeded { .. })
    }
}
