use thiserror::Error;

use crate::seminorms::SeminormMethod;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error(
        "member `{member}` maps datum {datum} to coordinate {coordinate} = {value}, outside [{lower}, {upper}]"
    )]
    DomainViolation {
        member: String,
        datum: usize,
        coordinate: usize,
        value: f64,
        lower: f64,
        upper: f64,
    },

    #[error("invalid domain: {0}")]
    InvalidDomain(String),

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    Dimension { expected: usize, actual: usize },

    #[error("shape error: {0}")]
    Shape(String),

    #[error("kernel arity {arity} exceeds sample size {n}")]
    Arity { arity: usize, n: usize },

    #[error("argument out of range: {0}")]
    OutOfRange(String),

    #[error("index {index} out of range for n = {n}")]
    Index { index: usize, n: usize },

    #[error("double difference needs distinct indices, got k = l = {0}")]
    SameIndex(usize),

    #[error("search budget must be at least one evaluation")]
    ZeroBudget,

    #[error("finite-difference step: {0}")]
    Step(String),

    #[error("vector set is empty")]
    EmptySet,

    #[error("at least {min} replicates required, got {got}")]
    Replicates { min: usize, got: usize },

    #[error("{0:?} seminorms are lower bounds and cannot enter a certificate")]
    UncertifiedSeminorms(SeminormMethod),

    #[error("confidence parameter delta = {0} is not in (0, 1)")]
    Delta(f64),

    #[error("certificate inapplicable: {0}")]
    Inapplicable(String),

    #[error("subset enumeration limited to n <= {max}, got n = {n}")]
    EnumerationBudget { n: usize, max: usize },

    #[error("weight function has unbounded Lipschitz constant (zeta = 0)")]
    UnboundedLipschitz,

    #[error(
        "objective increased in restart {restart} at iteration {iteration}: {previous} -> {current}"
    )]
    DescentViolation {
        restart: usize,
        iteration: usize,
        previous: f64,
        current: f64,
    },

    #[error("config error at `{pointer}`: {message}")]
    Config { pointer: String, message: String },

    #[error("mixed result kinds cannot be tabulated together: {0} and {1}")]
    MixedKinds(String, String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}
