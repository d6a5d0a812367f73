use thiserror::Error;

/// Errors produced by the coin-flip library.
#[derive(Debug, Error)]
#[non_exhaustive]
pub enum Error {
    /// A probability-valued input fell outside `[0, 1]`.
    #[error("probability out of range: {0}")]
    ProbOutOfRange(String),
    /// The six parameters do not describe a definable coin flip.
    #[error("constraint violated: {0}")]
    ConstraintViolation(String),
    /// A constructor was called outside its domain.
    #[error("precondition violated: {0}")]
    PreconditionViolation(String),
    /// No protocol in the requested setting implements the spec.
    #[error("infeasible spec: {0}")]
    InfeasibleSpec(String),
    /// The tree failed well-formedness checks.
    #[error("malformed tree: {0}")]
    MalformedTree(String),
    /// Brute-force enumeration would exceed the configured strategy limit.
    #[error("strategy enumeration guard: {count} strategies exceed limit {limit}")]
    ExplosionGuard { count: u128, limit: u128 },
    /// An adversary script does not fit the tree it is run against.
    #[error("script mismatch: {0}")]
    ScriptMismatch(String),
    /// A number or document could not be parsed.
    #[error("parse error: {0}")]
    Parse(String),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
