use thiserror::Error;

/// Errors produced by poset construction, family generators and the verifier.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid size: {0}")]
    InvalidSize(String),

    #[error("unknown event `{0}`")]
    MissingEvent(String),

    #[error("invalid tuple: {0}")]
    InvalidTuple(String),

    #[error("tuple ({}) is not admissible", .0.join(", "))]
    Inadmissible(Vec<String>),

    #[error("shape error: {0}")]
    Shape(String),

    #[error("event token `{0}` appears in both operands")]
    Collision(String),

    #[error("invalid depth d={d}: {reason}")]
    InvalidDepth { d: usize, reason: String },

    #[error("invalid family: {0}")]
    InvalidFamily(String),

    #[error("{what}: {count} exceeds budget {budget}")]
    Infeasible {
        what: String,
        count: u128,
        budget: u128,
    },

    #[error("random family generation failed after {retries} retries; tuple ({}) missed", .missed.join(", "))]
    GenerationFailed { retries: usize, missed: Vec<String> },

    #[error("schedule pool exhausted; tuple ({}) cannot be covered", .witness.join(", "))]
    PoolExhausted { witness: Vec<String> },

    #[error("addressing error: {0}")]
    Addressing(String),

    #[error("invalid pattern: {0}")]
    InvalidPattern(String),

    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("cycle through {}", .0.join(" -> "))]
    Cycle(Vec<String>),

    #[error("reference to unknown event `{0}`")]
    Reference(String),

    #[error("edge {0} -> {1} is implied by other edges")]
    TransitiveEdge(String, String),

    #[error("cut procedure invariant violated: {0}")]
    CutInvariant(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
