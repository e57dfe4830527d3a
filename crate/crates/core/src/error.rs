use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("parse error: {0}")]
    Parse(String),

    /// The requested accuracy needs more continued-fraction depth than is known.
    #[error("precision unreachable: {0}")]
    PrecisionUnreachable(String),

    /// An irrational angle approximation is too coarse for the requested trace depth.
    #[error("insufficient precision: {0}")]
    InsufficientPrecision(String),

    /// The α/β naming is only defined for c off the real ray [1/4, ∞).
    #[error("fixed-point convention undefined for c = {re} + {im}i")]
    ConventionUndefined { re: f64, im: f64 },

    #[error("inconclusive geometry: {0}")]
    InconclusiveGeometry(String),

    #[error("not a ray pair: {0}")]
    NotARayPair(String),

    /// A wake of angle exactly 1/2 has its root at the critical point.
    #[error("root is the critical point (wake angle 1/2)")]
    RootIsCritical,

    /// Exact and geometric answers disagree. This is a bug trap, not a math outcome.
    #[error("consistency failure: {0}")]
    ConsistencyFailure(String),

    #[error("trace aborted: {0}")]
    TraceAborted(String),
}
