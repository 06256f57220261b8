use thiserror::Error;

/// Everything that can go wrong when estimating moments, solving for
/// weights, or sampling from the posterior predictive.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// Fewer than two observations; the scatter matrix needs at least two.
    #[error("window has {n} observation(s); need at least 2")]
    WindowTooSmall { n: usize },

    /// A row, label list, or weight vector does not match the asset count.
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    /// NaN or infinity in the input data (zero-based row/column).
    #[error("non-finite value at row {row}, column {col}")]
    NonFiniteInput { row: usize, col: usize },

    /// Sample size too small relative to the number of assets for the
    /// requested operation. `needed` is the smallest admissible n.
    #[error("insufficient degrees of freedom: k = {k}, n = {n}; need n >= {needed}")]
    DegreesOfFreedom { k: usize, n: usize, needed: usize },

    /// Cholesky factorization of the scatter matrix hit a non-positive
    /// (or numerically negligible) pivot.
    #[error("scatter matrix is singular: pivot {pivot:.3e} at index {index} (tolerance {tolerance:.3e})")]
    SingularScatter {
        index: usize,
        pivot: f64,
        tolerance: f64,
    },

    /// Risk aversion must be strictly positive.
    #[error("risk aversion gamma must be positive, got {gamma}")]
    NonPositiveGamma { gamma: f64 },

    /// Target variance below the global minimum-variance level.
    #[error("target variance {v0:.6e} is below the minimum attainable {minimum:.6e}")]
    InfeasibleVariance { v0: f64, minimum: f64 },

    /// The excess-return direction Q x̄ vanishes (mean vector proportional
    /// to ones), so no portfolio trades return against variance.
    #[error("degenerate frontier: mean vector is proportional to ones, target is unreachable")]
    DegenerateFrontier,

    /// Interval level must satisfy 0 < alpha < 1.
    #[error("interval level alpha must lie in (0, 1), got {alpha}")]
    InvalidAlpha { alpha: f64 },

    /// Portfolio weights must sum to one.
    #[error("weights sum to {sum}, expected 1 (tolerance 1e-8)")]
    InvalidWeights { sum: f64 },

    /// Too few draws to form the requested quantiles.
    #[error("need at least {needed} draws, got {b}")]
    InsufficientDraws { b: usize, needed: usize },
}

pub type Result<T> = std::result::Result<T, Error>;
