use thiserror::Error;

use crate::rational::Rational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error(
        "dimension mismatch: divisor on {left} points combined with divisor on {right} points"
    )]
    DimensionMismatch { left: usize, right: usize },

    #[error("{0} is a perfect square")]
    PerfectSquare(u64),

    #[error("the number of points must be at least 1")]
    NoPoints,

    #[error("SHGH implies Nagata; assume_shgh set without assume_nagata")]
    InconsistentAssumptions,

    #[error("divisor is not balanced (multiplicities differ by more than 1)")]
    NotBalanced,

    #[error("2d + 3 = 0: the divisor has no finite wall")]
    DegenerateWall,

    #[error("n = {0} is not supported by this operation")]
    UnsupportedN(usize),

    #[error("integrality failure: {0}")]
    Integrality(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("t = {0} lies on a wall; perturb t into an open chamber")]
    OnWall(Rational),

    #[error("t = {t} is outside the admissible range ({range})")]
    OutOfRange { t: Rational, range: String },

    #[error("walls accumulate at sqrt({0}); t_min must be strictly greater than sqrt(n)")]
    NonTermination(usize),

    #[error("missing assumption: {0} must be assumed for this computation")]
    MissingAssumption(&'static str),

    #[error("classification inconsistency: {0}")]
    Inconsistent(String),

    #[error("element ({d}, {m}) does not lie on the chain's quadratic")]
    OffQuadratic { d: String, m: String },

    #[error("chain expansion exceeded the depth cap of {0}")]
    DepthExceeded(usize),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
