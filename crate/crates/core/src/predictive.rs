//! Exact sampling from the posterior predictive distribution of a
//! portfolio's next-period return, plus equal-tailed credible intervals.
//!
//! For a fully-invested weight vector w and a window summary (x̄, S) with
//! n > k, the predictive return decomposes into the location wᵀx̄, the
//! scale sqrt(wᵀSw), and a pivotal shock built from two independent
//! Student-t variates:
//!
//! ```text
//! X = wᵀx̄ + sqrt(wᵀSw) · [ t₁ / sqrt(n(n−k))
//!                        + sqrt(1 + t₁²/(n−k)) · t₂ / sqrt(n−k+1) ]
//! t₁ ~ t_{n−k},  t₂ ~ t_{n−k+1}  independent.
//! ```
//!
//! The first term is the posterior uncertainty about the mean, the second
//! the return noise scaled by the posterior covariance draw; conditioning
//! twice collapses the k-dimensional posterior into two univariate t
//! factors. Sampling is exact for every n > k, while closed-form
//! predictive moments additionally need n − k > 2.
//!
//! [`oracle_draw_hierarchical`] draws the same distribution the long way
//! — μ from its multivariate-t marginal, Σ | μ from the inverse Wishart
//! via a Bartlett factor, then a conditional normal — and exists to
//! validate the representation above; the two samplers must agree in
//! distribution.
//!
//! Per-draw randomness comes from counter-split ChaCha streams (see
//! [`crate::sampling`]): stream `tag | i` feeds draw i, with consumption
//! order fixed as documented on each sampler, so results are independent
//! of thread count and stable under increasing the draw budget.

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_chacha::ChaCha12Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::linalg;
use crate::moments::MomentSummary;
use crate::portfolio::bayes_weights_gamma;
use crate::sampling::{base_rng, chi_square_draw, student_t_draw, substream, TAG_ORACLE, TAG_REPRESENTATION};
use crate::stats::empirical_quantile;

/// Which sampler produced a batch of draws.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DrawSource {
    /// The two-t direct representation.
    Representation,
    /// The μ → Σ|μ → X|μ,Σ hierarchical reference sampler.
    HierarchicalOracle,
}

/// A batch of predictive return draws for one portfolio, in draw-index
/// order, along with the scalars the interval code needs.
#[derive(Debug, Clone)]
pub struct PredictiveDraws {
    values: Vec<f64>,
    seed: u64,
    source: DrawSource,
    portfolio_mean: f64,
    portfolio_scatter: f64,
    n: usize,
    k: usize,
}

impl PredictiveDraws {
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn b(&self) -> usize {
        self.values.len()
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn source(&self) -> DrawSource {
        self.source
    }

    /// wᵀx̄ — the analytic predictive mean.
    pub fn portfolio_mean(&self) -> f64 {
        self.portfolio_mean
    }

    /// wᵀSw — the portfolio's scatter quadratic.
    pub fn portfolio_scatter(&self) -> f64 {
        self.portfolio_scatter
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }
}

/// Equal-tailed credible interval for the next-period return, with the
/// analytic predictive mean as the point summary.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CredibleInterval {
    pub lower: f64,
    pub upper: f64,
    pub alpha: f64,
    pub point: f64,
}

/// One row of [`interval_report`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntervalEstimate {
    pub gamma: f64,
    pub expected_return: f64,
    pub variance: f64,
    pub interval: CredibleInterval,
}

fn validate_weights(summary: &MomentSummary, weights: &DVector<f64>) -> Result<()> {
    if weights.len() != summary.k() {
        return Err(Error::DimensionMismatch {
            expected: summary.k(),
            got: weights.len(),
        });
    }
    for (i, w) in weights.iter().enumerate() {
        if !w.is_finite() {
            return Err(Error::NonFiniteInput { row: 0, col: i });
        }
    }
    let sum: f64 = weights.iter().sum();
    if (sum - 1.0).abs() > 1e-8 {
        return Err(Error::InvalidWeights { sum });
    }
    Ok(())
}

/// Location/scale plus the fixed dof constants of the representation.
struct RepContext {
    location: f64,
    scale: f64,
    nu1: f64,
    inv_sqrt_nnu: f64,
    inv_sqrt_nu2: f64,
}

impl RepContext {
    fn new(summary: &MomentSummary, weights: &DVector<f64>) -> Result<(Self, f64)> {
        let n = summary.n() as f64;
        let nu1 = n - summary.k() as f64;
        // wᵀSw through the factor: ‖Lᵀw‖² is nonnegative by construction.
        let lt_w = summary.chol()?.transpose() * weights;
        let scatter_quad = lt_w.norm_squared();
        let ctx = Self {
            location: weights.dot(summary.mean()),
            scale: scatter_quad.sqrt(),
            nu1,
            inv_sqrt_nnu: 1.0 / (n * nu1).sqrt(),
            inv_sqrt_nu2: 1.0 / (nu1 + 1.0).sqrt(),
        };
        Ok((ctx, scatter_quad))
    }

    /// Stream consumption order: t₁ (normal, chi-square), then t₂.
    fn draw(&self, rng: &mut ChaCha12Rng) -> f64 {
        let t1 = student_t_draw(self.nu1, rng);
        let t2 = student_t_draw(self.nu1 + 1.0, rng);
        let shock =
            t1 * self.inv_sqrt_nnu + (1.0 + t1 * t1 / self.nu1).sqrt() * t2 * self.inv_sqrt_nu2;
        self.location + self.scale * shock
    }
}

/// Draw b predictive returns for `weights` using the direct two-t
/// representation. Needs n > k and fully-invested finite weights.
pub fn draw_predictive(
    summary: &MomentSummary,
    weights: &DVector<f64>,
    b: usize,
    seed: u64,
) -> Result<PredictiveDraws> {
    draw_predictive_threaded(summary, weights, b, seed, 1)
}

/// [`draw_predictive`] with the index range split across `threads` worker
/// threads. Output is bit-identical for every thread count because draw i
/// depends only on its own stream.
pub fn draw_predictive_threaded(
    summary: &MomentSummary,
    weights: &DVector<f64>,
    b: usize,
    seed: u64,
    threads: usize,
) -> Result<PredictiveDraws> {
    validate_weights(summary, weights)?;
    let (ctx, scatter_quad) = RepContext::new(summary, weights)?;
    let location = ctx.location;
    let base = base_rng(seed);
    let values = run_indexed(b, threads, move |i| {
        ctx.draw(&mut substream(&base, TAG_REPRESENTATION, i as u64))
    });
    Ok(PredictiveDraws {
        values,
        seed,
        source: DrawSource::Representation,
        portfolio_mean: location,
        portfolio_scatter: scatter_quad,
        n: summary.n(),
        k: summary.k(),
    })
}

/// Map draw indices to values, serially or on a dedicated rayon pool.
fn run_indexed<F>(b: usize, threads: usize, f: F) -> Vec<f64>
where
    F: Fn(usize) -> f64 + Send + Sync,
{
    if threads <= 1 {
        (0..b).map(f).collect()
    } else {
        use rayon::prelude::*;
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .expect("failed to build worker pool");
        pool.install(|| (0..b).into_par_iter().map(f).collect())
    }
}

/// Closed-form predictive mean and variance of the portfolio return:
/// E = wᵀx̄ and Var = c(k, n)·wᵀSw. Needs n > k + 2.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PredictiveMoments {
    pub mean: f64,
    pub variance: f64,
}

pub fn predictive_moments(
    summary: &MomentSummary,
    weights: &DVector<f64>,
) -> Result<PredictiveMoments> {
    validate_weights(summary, weights)?;
    let coefs = summary.coefficients()?;
    let (ctx, scatter_quad) = RepContext::new(summary, weights)?;
    Ok(PredictiveMoments {
        mean: ctx.location,
        variance: coefs.c * scatter_quad,
    })
}

/// Draw b predictive returns through the full hierarchy, as a reference
/// for validating [`draw_predictive`]:
///
/// 1. μ ~ t_{n−k}(x̄, S/(n(n−k))) — k normals, then one chi-square(n−k);
/// 2. Σ | μ via Σ⁻¹ ~ Wishart(n, (S + n(μ−x̄)(μ−x̄)ᵀ)⁻¹), drawn with a
///    Bartlett factor — per column j: one chi-square(n−j) for the
///    diagonal, then the subdiagonal normals;
/// 3. X | μ, Σ ~ N(wᵀμ, wᵀΣw) — one final normal.
///
/// wᵀΣw is evaluated as ‖A⁻¹L̃ᵀw‖² (L̃ the factor of the scale matrix, A
/// the Bartlett factor), so no k×k inverse is ever formed.
pub fn oracle_draw_hierarchical(
    summary: &MomentSummary,
    weights: &DVector<f64>,
    b: usize,
    seed: u64,
) -> Result<PredictiveDraws> {
    validate_weights(summary, weights)?;
    let l_s = summary.chol()?;
    let n = summary.n();
    let k = summary.k();
    let nf = n as f64;
    let nu = nf - k as f64;
    let mean = summary.mean();
    let scatter = summary.scatter();
    let location = weights.dot(mean);
    let lt_w = l_s.transpose() * weights;
    let scatter_quad = lt_w.norm_squared();
    let mu_scale = 1.0 / (nf * nu).sqrt();

    let base = base_rng(seed);
    let mut values = Vec::with_capacity(b);
    for i in 0..b {
        let rng = &mut substream(&base, TAG_ORACLE, i as u64);

        // (1) posterior mean draw.
        let z = DVector::from_fn(k, |_, _| rng.sample::<f64, _>(StandardNormal));
        let chi_mu = chi_square_draw(nu, rng);
        let delta = l_s * z * ((nu / chi_mu).sqrt() * mu_scale);
        let mu = mean + &delta;

        // (2) covariance draw conditional on μ.
        let s_tilde = scatter + nf * &delta * delta.transpose();
        let l_tilde = linalg::cholesky_lower(&s_tilde)?;
        let mut bartlett = DMatrix::zeros(k, k);
        for j in 0..k {
            bartlett[(j, j)] = chi_square_draw(nf - j as f64, rng).sqrt();
            for r in (j + 1)..k {
                bartlett[(r, j)] = rng.sample::<f64, _>(StandardNormal);
            }
        }
        let y = l_tilde.transpose() * weights;
        let a_inv_y = linalg::forward_substitute(&bartlett, &y);
        let sigma_quad = a_inv_y.norm_squared();

        // (3) conditional return draw.
        let zr: f64 = rng.sample(StandardNormal);
        values.push(weights.dot(&mu) + sigma_quad.sqrt() * zr);
    }

    Ok(PredictiveDraws {
        values,
        seed,
        source: DrawSource::HierarchicalOracle,
        portfolio_mean: location,
        portfolio_scatter: scatter_quad,
        n,
        k,
    })
}

/// Equal-tailed credible interval at level 1−α from a draw batch: the
/// empirical α/2 and 1−α/2 quantiles, with the analytic predictive mean
/// as point summary. Needs at least two draws and 0 < α < 1.
pub fn credible_interval(draws: &PredictiveDraws, alpha: f64) -> Result<CredibleInterval> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::InvalidAlpha { alpha });
    }
    if draws.b() < 2 {
        return Err(Error::InsufficientDraws {
            b: draws.b(),
            needed: 2,
        });
    }
    let mut sorted = draws.values.clone();
    sorted.sort_unstable_by(f64::total_cmp);
    Ok(CredibleInterval {
        lower: empirical_quantile(&sorted, alpha / 2.0),
        upper: empirical_quantile(&sorted, 1.0 - alpha / 2.0),
        alpha,
        point: draws.portfolio_mean,
    })
}

/// For each risk aversion, solve the Bayes rule, draw b predictive
/// returns for the resulting portfolio, and summarize with a credible
/// interval. Rows come back ordered by γ descending. Every row reuses the
/// same base seed (common random numbers), which makes interval width
/// exactly nonincreasing in γ rather than merely on average.
pub fn interval_report(
    summary: &MomentSummary,
    gammas: &[f64],
    alpha: f64,
    b: usize,
    seed: u64,
) -> Result<Vec<IntervalEstimate>> {
    interval_report_threaded(summary, gammas, alpha, b, seed, 1)
}

/// [`interval_report`] with a thread budget for the draw loops.
pub fn interval_report_threaded(
    summary: &MomentSummary,
    gammas: &[f64],
    alpha: f64,
    b: usize,
    seed: u64,
    threads: usize,
) -> Result<Vec<IntervalEstimate>> {
    let mut order: Vec<f64> = gammas.to_vec();
    order.sort_unstable_by(|x, y| y.total_cmp(x));
    let mut rows = Vec::with_capacity(order.len());
    for gamma in order {
        let sol = bayes_weights_gamma(summary, gamma)?;
        let draws = draw_predictive_threaded(summary, &sol.weights, b, seed, threads)?;
        let interval = credible_interval(&draws, alpha)?;
        rows.push(IntervalEstimate {
            gamma,
            expected_return: sol.expected_return,
            variance: sol.variance,
            interval,
        });
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::moments::{estimate_moments, ReturnsWindow};
    use crate::portfolio::gmv_weights;
    use crate::stats;
    use crate::testutil::{random_summary, random_window};
    use approx::{assert_abs_diff_eq, assert_relative_eq};

    fn gmv(summary: &MomentSummary) -> DVector<f64> {
        gmv_weights(summary).unwrap().weights
    }

    #[test]
    fn weight_validation() {
        let summary = random_summary(30, 4, 3);
        let short = DVector::from_vec(vec![0.5, 0.5]);
        assert!(matches!(
            draw_predictive(&summary, &short, 8, 1),
            Err(Error::DimensionMismatch { expected: 4, got: 2 })
        ));
        let nan = DVector::from_vec(vec![0.5, f64::NAN, 0.3, 0.2]);
        assert!(matches!(
            draw_predictive(&summary, &nan, 8, 1),
            Err(Error::NonFiniteInput { .. })
        ));
        let off = DVector::from_vec(vec![0.5, 0.3, 0.3, 0.2]);
        match draw_predictive(&summary, &off, 8, 1) {
            Err(Error::InvalidWeights { sum }) => assert_relative_eq!(sum, 1.3),
            other => panic!("expected InvalidWeights, got {other:?}"),
        }
    }

    #[test]
    fn sampler_honors_n_greater_than_k_only() {
        // n = k + 1: sampling works, closed-form moments do not.
        let summary = estimate_moments(&random_window(5, 4, 7)).unwrap();
        let w = DVector::from_element(4, 0.25);
        assert!(draw_predictive(&summary, &w, 16, 9).is_ok());
        assert!(oracle_draw_hierarchical(&summary, &w, 16, 9).is_ok());
        assert!(matches!(
            predictive_moments(&summary, &w),
            Err(Error::DegreesOfFreedom { needed: 7, .. })
        ));
    }

    #[test]
    fn single_draw_matches_manual_assembly() {
        let summary = random_summary(26, 3, 15);
        let w = gmv(&summary);
        let batch = draw_predictive(&summary, &w, 1, 1234).unwrap();

        // Replay stream 0 by hand.
        let base = crate::sampling::base_rng(1234);
        let rng = &mut crate::sampling::substream(&base, TAG_REPRESENTATION, 0);
        let nu = 23.0;
        let t1 = student_t_draw(nu, rng);
        let t2 = student_t_draw(nu + 1.0, rng);
        let m = w.dot(summary.mean());
        let s = (summary.scatter() * &w).dot(&w).sqrt();
        let expected = m
            + s * (t1 / (26.0 * nu).sqrt()
                + (1.0 + t1 * t1 / nu).sqrt() * t2 / (nu + 1.0).sqrt());
        assert_relative_eq!(batch.values()[0], expected, max_relative = 1e-12);
        assert_eq!(batch.b(), 1);
        assert_eq!(batch.source(), DrawSource::Representation);
    }

    #[test]
    fn draws_are_deterministic_prefix_stable_and_thread_invariant() {
        let summary = random_summary(40, 5, 21);
        let w = gmv(&summary);
        let a = draw_predictive(&summary, &w, 500, 7).unwrap();
        let b = draw_predictive(&summary, &w, 500, 7).unwrap();
        assert_eq!(a.values(), b.values());

        let longer = draw_predictive(&summary, &w, 800, 7).unwrap();
        assert_eq!(&longer.values()[..500], a.values());

        let threaded = draw_predictive_threaded(&summary, &w, 500, 7, 4).unwrap();
        assert_eq!(threaded.values(), a.values());

        let other_seed = draw_predictive(&summary, &w, 500, 8).unwrap();
        assert_ne!(other_seed.values(), a.values());

        assert!(a.values().iter().all(|v| v.is_finite()));
    }

    #[test]
    fn draws_match_closed_form_moments() {
        let summary = random_summary(30, 3, 33);
        let w = gmv(&summary);
        let m = predictive_moments(&summary, &w).unwrap();
        let b = 200_000;
        let draws = draw_predictive(&summary, &w, b, 55).unwrap();
        let mc_mean = stats::mean(draws.values());
        let mc_var = stats::variance(draws.values());
        // t tails at ν = 27 are mild; 3·SE on the mean, 2% on variance.
        let se = (m.variance / b as f64).sqrt();
        assert!(
            (mc_mean - m.mean).abs() <= 3.0 * se,
            "mean {mc_mean} vs {} (se {se})",
            m.mean
        );
        assert_relative_eq!(mc_var, m.variance, max_relative = 0.02);
    }

    #[test]
    fn monte_carlo_error_shrinks_with_budget() {
        let summary = random_summary(36, 4, 71);
        let w = gmv(&summary);
        let m = predictive_moments(&summary, &w).unwrap();
        let sd = m.variance.sqrt();
        let mut errs = Vec::new();
        for b in [1_000usize, 10_000, 100_000] {
            let draws = draw_predictive(&summary, &w, b, 13).unwrap();
            let err = (stats::mean(draws.values()) - m.mean).abs();
            assert!(
                err <= 4.0 * sd / (b as f64).sqrt(),
                "error {err} too large at b = {b}"
            );
            errs.push(err);
        }
        assert!(
            errs[2] < errs[0],
            "10^5-draw error {} should beat 10^3-draw error {}",
            errs[2],
            errs[0]
        );
    }

    #[test]
    fn draws_are_symmetric_about_the_mean() {
        let summary = random_summary(52, 5, 81);
        let w = gmv(&summary);
        let draws = draw_predictive(&summary, &w, 100_000, 19).unwrap();
        assert!(stats::skewness(draws.values()).abs() < 0.05);
    }

    #[test]
    fn location_scale_equivariance() {
        let window = random_window(28, 3, 101);
        let summary = estimate_moments(&window).unwrap();
        let w = gmv(&summary);
        let draws = draw_predictive(&summary, &w, 512, 3).unwrap();

        // Doubling the data doubles every draw bit for bit: powers of two
        // commute with rounding at every step of the pipeline.
        let doubled =
            estimate_moments(&ReturnsWindow::new(window.data() * 2.0).unwrap()).unwrap();
        let draws2 = draw_predictive(&doubled, &w, 512, 3).unwrap();
        for (a, b) in draws.values().iter().zip(draws2.values()) {
            assert_eq!(*b, 2.0 * a);
        }

        // General affine map a·x + shift·𝟏: equivariant up to rounding.
        let (aff_a, shift) = (1.5, 0.003);
        let mapped = estimate_moments(
            &ReturnsWindow::new(window.data().map(|x| aff_a * x + shift)).unwrap(),
        )
        .unwrap();
        let draws3 = draw_predictive(&mapped, &w, 512, 3).unwrap();
        for (a, b) in draws.values().iter().zip(draws3.values()) {
            assert_abs_diff_eq!(*b, aff_a * a + shift, epsilon = 1e-13);
        }
    }

    #[test]
    fn interval_quantile_ranks_on_integer_values() {
        // 101 integer draws: the 90% equal-tailed interval cuts at ranks
        // 6 and 96 exactly.
        let values: Vec<f64> = (1..=101).map(f64::from).collect();
        // Deterministic shuffle.
        let mut idx = 0usize;
        let mut shuffled = Vec::with_capacity(101);
        for _ in 0..101 {
            shuffled.push(values[idx]);
            idx = (idx + 53) % 101;
        }
        let draws = PredictiveDraws {
            values: shuffled,
            seed: 0,
            source: DrawSource::Representation,
            portfolio_mean: 51.0,
            portfolio_scatter: 1.0,
            n: 10,
            k: 2,
        };
        let ci = credible_interval(&draws, 0.10).unwrap();
        assert_eq!(ci.lower, 6.0);
        assert_eq!(ci.upper, 96.0);
        assert_eq!(ci.point, 51.0);
        assert_eq!(ci.alpha, 0.10);
    }

    #[test]
    fn interval_validation() {
        let summary = random_summary(30, 3, 2);
        let w = gmv(&summary);
        let draws = draw_predictive(&summary, &w, 100, 1).unwrap();
        for alpha in [0.0, 1.0, -0.2, 1.5, f64::NAN] {
            assert!(matches!(
                credible_interval(&draws, alpha),
                Err(Error::InvalidAlpha { .. })
            ));
        }
        let one = draw_predictive(&summary, &w, 1, 1).unwrap();
        assert!(matches!(
            credible_interval(&one, 0.05),
            Err(Error::InsufficientDraws { b: 1, needed: 2 })
        ));
    }

    #[test]
    fn interval_brackets_point_and_narrows_with_gamma() {
        let summary = random_summary(52, 5, 111);
        let gammas = [10.0, 25.0, 50.0, 75.0, 100.0];
        let rows = interval_report(&summary, &gammas, 0.05, 20_000, 77).unwrap();
        assert_eq!(rows.len(), gammas.len());
        // Descending γ ordering.
        for pair in rows.windows(2) {
            assert!(pair[0].gamma > pair[1].gamma);
        }
        // Bracketing, plus exact width monotonicity under common random
        // numbers: width grows as γ falls.
        let mut prev_width = f64::NEG_INFINITY;
        for row in rows.iter() {
            assert!(row.interval.lower < row.interval.point);
            assert!(row.interval.point < row.interval.upper);
            let width = row.interval.upper - row.interval.lower;
            assert!(
                width >= prev_width,
                "width {width} shrank while γ decreased"
            );
            prev_width = width;
        }
        // Portfolio variance decreases in γ alongside.
        for pair in rows.windows(2) {
            assert!(pair[0].variance < pair[1].variance);
        }
    }

    #[test]
    fn oracle_matches_analytic_moments() {
        let summary = random_summary(30, 3, 121);
        let w = gmv(&summary);
        let m = predictive_moments(&summary, &w).unwrap();
        let b = 100_000;
        let draws = oracle_draw_hierarchical(&summary, &w, b, 23).unwrap();
        assert_eq!(draws.source(), DrawSource::HierarchicalOracle);
        let se = (m.variance / b as f64).sqrt();
        let mc_mean = stats::mean(draws.values());
        assert!(
            (mc_mean - m.mean).abs() <= 3.0 * se,
            "oracle mean {mc_mean} vs {}",
            m.mean
        );
        assert_relative_eq!(
            stats::variance(draws.values()),
            m.variance,
            max_relative = 0.05
        );
        // Reproducible.
        let again = oracle_draw_hierarchical(&summary, &w, 64, 23).unwrap();
        assert_eq!(&draws.values()[..64], again.values());
    }
}
