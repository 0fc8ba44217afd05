use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("NonFiniteInput: non-finite value in {what}")]
    NonFiniteInput { what: String },
    #[error("DimensionMismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("AsymmetricInput: entry ({i},{j}) differs from ({j},{i}) by {diff:e}")]
    AsymmetricInput { i: usize, j: usize, diff: f64 },
    #[error("InvalidInput: {0}")]
    InvalidInput(String),
    #[error("TooFewObservations: need at least {min} observations, got {n}")]
    TooFewObservations { n: usize, min: usize },
    #[error("KTooLarge: k = {k} is not in 1..={max} for n = {n}")]
    KTooLarge { k: usize, n: usize, max: usize },
    #[error("GraphInfeasible: no spanning tree disjoint from earlier levels at level {level}")]
    GraphInfeasible { level: usize },
    #[error("BandwidthNonPositive: kernel bandwidth must be positive, got {0}")]
    BandwidthNonPositive(f64),
    #[error("MetricMismatch: {0}")]
    MetricMismatch(String),
    #[error("IndexOutOfRange: need 0 <= t1 < t2 <= n, got t1 = {t1}, t2 = {t2}, n = {n}")]
    IndexOutOfRange { t1: usize, t2: usize, n: usize },
    #[error("DegenerateVariance: zero null variance at ({t1},{t2})")]
    DegenerateVariance { t1: usize, t2: usize },
    #[error("SingularCovariance: null covariance of (U1, U2) is singular at ({t1},{t2})")]
    SingularCovariance { t1: usize, t2: usize },
    #[error("AllCandidatesDegenerate: every candidate in the scan window has degenerate null moments")]
    AllCandidatesDegenerate,
    #[error("WindowEmpty: scan window [{lo}, {hi}] is empty or out of range for n = {n}")]
    WindowEmpty { lo: usize, hi: usize, n: usize },
    #[error("NegativeArgument: {0} is negative")]
    NegativeArgument(f64),
    #[error("ArgumentAtPole: x = {x} is outside (1/n, 1 - 1/n) for n = {n}")]
    ArgumentAtPole { n: usize, x: f64 },
    #[error("QuadratureFailure: tail integral did not converge (last change {change:e})")]
    QuadratureFailure { change: f64 },
    #[error("BracketFailure: tail probability does not cross {alpha} on the search interval")]
    BracketFailure { alpha: f64 },
    #[error("MissingSkewness: skewness correction requested without a skewness table")]
    MissingSkewness,
    #[error("EnumerationTooLarge: exhaustive enumeration limited to n <= {max}, got {n}")]
    EnumerationTooLarge { n: usize, max: usize },
    #[error("ExhaustiveTooLarge: exhaustive permutation limited to n <= {max}, got {n}")]
    ExhaustiveTooLarge { n: usize, max: usize },
    #[error("InvalidSampleCount: number of sampled permutations must be >= 1")]
    InvalidSampleCount,
    #[error("EmptyDraws: no null draws to take a quantile of")]
    EmptyDraws,
    #[error("InvalidProbability: {0} is not in (0, 1)")]
    InvalidProbability(f64),
    #[error("NonPositiveDefinite: covariance matrix is not positive definite")]
    NonPositiveDefinite,
    #[error("InvalidParameter: {0}")]
    InvalidParameter(String),
}

impl Error {
    /// True for errors caused by degenerate or singular null moments and
    /// failed numerics, as opposed to malformed input or configuration.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::DegenerateVariance { .. }
                | Error::SingularCovariance { .. }
                | Error::AllCandidatesDegenerate
                | Error::QuadratureFailure { .. }
                | Error::BracketFailure { .. }
        )
    }
}
