//! Error type shared by every module of the crate.

use thiserror::Error;

/// Convenience alias used throughout the crate.
pub type Result<T> = std::result::Result<T, Error>;

/// Everything that can go wrong while building dictionaries, measuring
/// diversity, or estimating entropies.
#[derive(Debug, Error)]
#[non_exhaustive]
pub enum Error {
    /// Two points, or a point and a dictionary, disagree on dimension.
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    /// A point has no coordinates at all.
    #[error("point has dimension zero")]
    EmptyPoint,

    /// An input coordinate is NaN or infinite.
    #[error("non-finite coordinate at index {index}")]
    NonFiniteCoordinate { index: usize },

    /// A kernel, window, or criterion parameter is outside its valid range.
    #[error("invalid parameter {name}: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    /// A kernel configuration string does not parse.
    #[error("cannot parse kernel spec '{input}': {reason}")]
    ParseKernel { input: String, reason: String },

    /// Pairwise diversity measures need at least two atoms.
    #[error("pairwise measure undefined: dictionary has {n} atom(s), need at least 2")]
    PairwiseUndefined { n: usize },

    /// An atom index lies outside the dictionary.
    #[error("index {index} out of range for {n} atoms")]
    IndexOutOfRange { index: usize, n: usize },

    /// Empirical norm bounds need at least one data point.
    #[error("kernel family {family} has no analytic norm bounds and requires a nonempty data set")]
    DataRequired { family: &'static str },

    /// The squared norm infimum vanished, so bounds dividing by it are undefined.
    #[error("norm infimum r^2 is zero; bounds dividing by r^2 are undefined")]
    ZeroNormInfimum,

    /// A Gram matrix read from external input is not symmetric.
    #[error("gram matrix not symmetric at ({i},{j}): {a} vs {b}")]
    AsymmetricGram { i: usize, j: usize, a: f64, b: f64 },

    /// A Gram diagonal entry is zero or negative.
    #[error("gram diagonal entry {index} is not positive: {value}")]
    NonPositiveDiagonal { index: usize, value: f64 },

    /// No symmetric positive definite factorization succeeded, even at the
    /// largest fallback jitter.
    #[error("positive definite factorization failed at jitter {jitter:e}")]
    FactorizationFailed { jitter: f64 },

    /// The Gram sum is not positive, so its logarithm does not exist.
    #[error("estimator undefined for this Gram sum: sum = {sum}")]
    GramSumNonPositive { sum: f64 },

    /// A feature-distance floor degenerates at the supplied measure value.
    #[error("floor degenerate: {reason}")]
    FloorDegenerate { reason: String },

    /// Plug-in probabilities must be positive and finite.
    #[error("invalid plug-in probabilities: {reason}")]
    InvalidProbabilities { reason: String },

    /// A squared feature distance came out more negative than round-off
    /// alone can explain.
    #[error("positive semidefiniteness violated: squared feature distance {value}")]
    PsdViolation { value: f64 },
}
