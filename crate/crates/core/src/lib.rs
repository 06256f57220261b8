//! Bayesian mean-variance portfolio selection.
//!
//! Given a window of n historical return vectors on k assets, a diffuse
//! conjugate prior on the (unknown) mean and covariance leads to
//! closed-form optimal portfolios, an analytic efficient frontier, and an
//! exact sampler for the posterior predictive distribution of a
//! portfolio's next-period return. This crate implements all three layers
//! plus the sample-based and known-parameter benchmarks they are measured
//! against:
//!
//! * [`moments`] — window summaries (mean, unnormalized scatter), the
//!   variance coefficients c and d, and the projection matrix Q;
//! * [`portfolio`] — closed-form optimal weights for exponential-utility
//!   and target-return / target-variance investors, in Bayesian, sample
//!   and known-parameter flavors;
//! * [`frontier`] — parabolic efficient frontiers in (variance, return)
//!   space for the Bayesian and sample families;
//! * [`predictive`] — exact draws from the posterior predictive return of
//!   a fixed portfolio, equal-tailed credible intervals, and a
//!   hierarchical reference sampler used to validate the direct one;
//! * [`stats`] — the small statistical toolbox used by the validation
//!   suites (empirical quantiles, two-sample Kolmogorov–Smirnov).
//!
//! Determinism: every sampler is driven by an explicit u64 seed through a
//! counter-based stream split, so results are reproducible bit for bit
//! across runs and thread counts.

pub mod error;
pub mod frontier;
mod linalg;
pub mod moments;
pub mod portfolio;
pub mod predictive;
pub mod sampling;
pub mod stats;
#[cfg(test)]
pub(crate) mod testutil;

pub use error::{Error, Result};
pub use frontier::{efficient_frontier, Family, FrontierParams};
pub use moments::{
    coefficients, estimate_moments, q_matrix, Coefficients, MomentSummary, ReturnsWindow,
};
pub use portfolio::{
    bayes_weights_gamma, bayes_weights_target_return, bayes_weights_target_variance, gmv_weights,
    population_weights_gamma, sample_weights_gamma, PopulationParams, PortfolioSolution, Rule,
};
pub use predictive::{
    credible_interval, draw_predictive, draw_predictive_threaded, interval_report,
    interval_report_threaded, oracle_draw_hierarchical, predictive_moments, CredibleInterval,
    DrawSource, IntervalEstimate, PredictiveDraws, PredictiveMoments,
};
pub use sampling::student_t_draw;
