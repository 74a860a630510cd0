use num_bigint::BigInt;
use thiserror::Error;

/// Everything that can go wrong while building or checking an expansion.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("cannot parse {what}: {input:?}")]
    Parse { what: &'static str, input: String },

    #[error("square root of negative rational requested")]
    NegativeSqrt,

    #[error("empty interval: lo > hi")]
    EmptyInterval,

    #[error("vector is zero or not primitive")]
    NotPrimitive,

    #[error("generator has non-positive third coordinate (cone not inside z > 0)")]
    NotInUpperHalfSpace,

    #[error("cone is not regular: determinant is {det}")]
    NotRegular { det: BigInt },

    #[error("triangle is degenerate (collinear vertices)")]
    Degenerate,

    #[error("line has a = b = 0")]
    LineAtInfinity,

    #[error("mediant is not primitive: parent cone is not regular")]
    NotCoprimePair,

    #[error("target lies on the splitting line of the starring")]
    OnSplitLine,

    #[error("no labeling puts the largest angle above pi/3 and the smallest below it")]
    RelabelImpossible,

    #[error("no steering parameter realizes the required angle window")]
    WindowEmpty,

    #[error("step 1 hit the iteration cap of {cap}")]
    IterationCap { cap: u64 },

    #[error("step 2 search exceeded max(p, q) = {cap}")]
    SearchCap { cap: u64 },

    #[error("angle threshold must satisfy pi/4 < theta < pi/3 (1/4 < cos^2 < 1/2)")]
    InvalidTheta,

    #[error("stage {stage} is not strictly nested after {rounds} rounds")]
    NestingFailed { stage: usize, rounds: usize },

    #[error("trace has {have} stages, enclosure needs {need}")]
    InsufficientDepth { have: usize, need: usize },

    #[error("invariant violated at stage {stage}: {what}")]
    Invariant { stage: usize, what: String },
}

pub type Result<T> = std::result::Result<T, Error>;
