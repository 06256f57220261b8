//! Closed-form optimal portfolios.
//!
//! All rules share one geometry. Write a = 𝟏ᵀS⁻¹𝟏, R_GMV = 𝟏ᵀS⁻¹x̄ / a and
//! q = x̄ᵀQx̄. The global minimum-variance portfolio w_GMV = S⁻¹𝟏 / a is the
//! anchor; every optimal rule moves away from it along the self-financing
//! direction Qx̄:
//!
//! ```text
//! w = w_GMV + step · Qx̄
//! ```
//!
//! For an investor maximizing E[return] − (γ/2)·Var under the posterior
//! predictive distribution the step is 1/(γ·c); replacing the posterior
//! coefficient c by the sample coefficient d = 1/(n−1) yields the plug-in
//! sample rule, and replacing (x̄, S, c) by known population parameters
//! (μ, Σ, 1) the classical one. Targeting an expected return r₀ or a
//! predictive variance v₀ instead of a risk aversion only re-parametrizes
//! the same line.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::linalg;
use crate::moments::{q_matrix, MomentSummary, QuadInputs};

/// Which optimality criterion produced a solution, with its parameter.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Rule {
    /// Posterior-predictive mean-variance utility with risk aversion γ.
    BayesGamma { gamma: f64 },
    /// Minimum predictive variance subject to expected return r₀.
    BayesTargetReturn { r0: f64 },
    /// Maximum expected return subject to predictive variance v₀.
    BayesTargetVariance { v0: f64 },
    /// Global minimum-variance portfolio.
    Gmv,
    /// Plug-in sample rule with risk aversion γ.
    SampleGamma { gamma: f64 },
    /// Known-parameter rule with risk aversion γ.
    PopulationGamma { gamma: f64 },
}

/// A fully-invested portfolio together with the expected return and
/// variance its rule assigns to it (posterior-predictive for the Bayes
/// rules, d-scaled for the sample rule, population for the known-parameter
/// rule).
#[derive(Debug, Clone, PartialEq)]
pub struct PortfolioSolution {
    pub rule: Rule,
    pub weights: DVector<f64>,
    pub expected_return: f64,
    pub variance: f64,
}

fn check_gamma(gamma: f64) -> Result<()> {
    if gamma > 0.0 && gamma.is_finite() {
        Ok(())
    } else {
        Err(Error::NonPositiveGamma { gamma })
    }
}

fn gmv_from(qi: &QuadInputs) -> DVector<f64> {
    &qi.s_inv_one / qi.one_quad
}

fn r_gmv_from(qi: &QuadInputs) -> f64 {
    qi.mean_one_quad / qi.one_quad
}

/// x̄ᵀQx̄ below this threshold means the mean carries no cross-sectional
/// signal (x̄ ∝ 𝟏 up to rounding): the frontier collapses to its vertex.
fn degeneracy_tolerance(summary: &MomentSummary) -> Result<f64> {
    let q = q_matrix(summary)?;
    Ok(1e-14 * summary.mean().norm_squared() * q.norm())
}

/// Global minimum-variance portfolio: w = S⁻¹𝟏 / (𝟏ᵀS⁻¹𝟏), expected return
/// 𝟏ᵀS⁻¹x̄ / 𝟏ᵀS⁻¹𝟏 and posterior-predictive variance c / (𝟏ᵀS⁻¹𝟏).
pub fn gmv_weights(summary: &MomentSummary) -> Result<PortfolioSolution> {
    let coefs = summary.coefficients()?;
    let qi = summary.quad_inputs()?;
    Ok(PortfolioSolution {
        rule: Rule::Gmv,
        weights: gmv_from(&qi),
        expected_return: r_gmv_from(&qi),
        variance: coefs.c / qi.one_quad,
    })
}

/// Posterior-predictive utility maximizer for risk aversion γ > 0:
///
/// ```text
/// w  = w_GMV + (γc)⁻¹ Qx̄
/// R  = R_GMV + (γc)⁻¹ x̄ᵀQx̄
/// V  = c/(𝟏ᵀS⁻¹𝟏) + (γ²c)⁻¹ x̄ᵀQx̄
/// ```
pub fn bayes_weights_gamma(summary: &MomentSummary, gamma: f64) -> Result<PortfolioSolution> {
    check_gamma(gamma)?;
    let coefs = summary.coefficients()?;
    let qi = summary.quad_inputs()?;
    let step = 1.0 / (gamma * coefs.c);
    Ok(PortfolioSolution {
        rule: Rule::BayesGamma { gamma },
        weights: gmv_from(&qi) + &qi.q_dir * step,
        expected_return: r_gmv_from(&qi) + qi.excess_quad * step,
        variance: coefs.c / qi.one_quad + qi.excess_quad / (gamma * gamma * coefs.c),
    })
}

/// Minimum-predictive-variance portfolio with expected return exactly r₀:
///
/// ```text
/// w = w_GMV + (r₀ − R_GMV) Qx̄ / x̄ᵀQx̄
/// V = c/(𝟏ᵀS⁻¹𝟏) + c (r₀ − R_GMV)² / x̄ᵀQx̄
/// ```
///
/// When x̄ᵀQx̄ vanishes every portfolio has expected return R_GMV, so any
/// other target is unreachable ([`Error::DegenerateFrontier`]).
pub fn bayes_weights_target_return(summary: &MomentSummary, r0: f64) -> Result<PortfolioSolution> {
    debug_assert!(r0.is_finite());
    let coefs = summary.coefficients()?;
    let qi = summary.quad_inputs()?;
    let r_gmv = r_gmv_from(&qi);
    if qi.excess_quad <= degeneracy_tolerance(summary)? {
        if (r0 - r_gmv).abs() <= 1e-12 * r_gmv.abs().max(1.0) {
            return Ok(PortfolioSolution {
                rule: Rule::BayesTargetReturn { r0 },
                weights: gmv_from(&qi),
                expected_return: r_gmv,
                variance: coefs.c / qi.one_quad,
            });
        }
        return Err(Error::DegenerateFrontier);
    }
    let gap = r0 - r_gmv;
    Ok(PortfolioSolution {
        rule: Rule::BayesTargetReturn { r0 },
        weights: gmv_from(&qi) + &qi.q_dir * (gap / qi.excess_quad),
        expected_return: r0,
        variance: coefs.c / qi.one_quad + coefs.c * gap * gap / qi.excess_quad,
    })
}

/// Maximum-expected-return portfolio with predictive variance v₀:
///
/// ```text
/// w = w_GMV + sqrt(v₀/c − 1/(𝟏ᵀS⁻¹𝟏)) Qx̄ / sqrt(x̄ᵀQx̄)
/// R = R_GMV + sqrt(v₀/c − 1/(𝟏ᵀS⁻¹𝟏)) sqrt(x̄ᵀQx̄)
/// ```
///
/// v₀ must be at least the GMV variance c/(𝟏ᵀS⁻¹𝟏); targets within a
/// relative 1e-12 above it are clamped onto the vertex so that rounding in
/// the caller's arithmetic cannot flip feasibility.
pub fn bayes_weights_target_variance(
    summary: &MomentSummary,
    v0: f64,
) -> Result<PortfolioSolution> {
    debug_assert!(v0.is_finite());
    let coefs = summary.coefficients()?;
    let qi = summary.quad_inputs()?;
    let v_gmv = coefs.c / qi.one_quad;
    if v0 < v_gmv {
        return Err(Error::InfeasibleVariance {
            v0,
            minimum: v_gmv,
        });
    }
    let r_gmv = r_gmv_from(&qi);
    if v0 <= v_gmv * (1.0 + 1e-12) {
        return Ok(PortfolioSolution {
            rule: Rule::BayesTargetVariance { v0 },
            weights: gmv_from(&qi),
            expected_return: r_gmv,
            variance: v_gmv,
        });
    }
    if qi.excess_quad <= degeneracy_tolerance(summary)? {
        // Flat frontier: no portfolio attains more variance-for-return,
        // the target is meaningless beyond the vertex.
        return Err(Error::DegenerateFrontier);
    }
    let radicand = v0 / coefs.c - 1.0 / qi.one_quad;
    let scale = radicand.sqrt() / qi.excess_quad.sqrt();
    Ok(PortfolioSolution {
        rule: Rule::BayesTargetVariance { v0 },
        weights: gmv_from(&qi) + &qi.q_dir * scale,
        expected_return: r_gmv + radicand.sqrt() * qi.excess_quad.sqrt(),
        variance: v0,
    })
}

/// Plug-in sample rule: the Bayes-γ formulas with c replaced by
/// d = 1/(n−1). Valid whenever n > k (no posterior moments needed).
pub fn sample_weights_gamma(summary: &MomentSummary, gamma: f64) -> Result<PortfolioSolution> {
    check_gamma(gamma)?;
    let qi = summary.quad_inputs()?;
    let d = 1.0 / (summary.n() as f64 - 1.0);
    let step = 1.0 / (gamma * d);
    Ok(PortfolioSolution {
        rule: Rule::SampleGamma { gamma },
        weights: gmv_from(&qi) + &qi.q_dir * step,
        expected_return: r_gmv_from(&qi) + qi.excess_quad * step,
        variance: d / qi.one_quad + qi.excess_quad / (gamma * gamma * d),
    })
}

/// Known population mean and covariance, for benchmarking the estimated
/// rules against the oracle investor.
#[derive(Debug, Clone)]
pub struct PopulationParams {
    mu: DVector<f64>,
    sigma_chol: DMatrix<f64>,
}

impl PopulationParams {
    /// Validate and factor the covariance (symmetrized first; must be
    /// positive definite).
    pub fn new(mu: DVector<f64>, sigma: DMatrix<f64>) -> Result<Self> {
        let k = mu.len();
        if sigma.nrows() != k || sigma.ncols() != k {
            return Err(Error::DimensionMismatch {
                expected: k,
                got: sigma.nrows().max(sigma.ncols()),
            });
        }
        for (i, v) in mu.iter().enumerate() {
            if !v.is_finite() {
                return Err(Error::NonFiniteInput { row: 0, col: i });
            }
        }
        for row in 0..k {
            for col in 0..k {
                if !sigma[(row, col)].is_finite() {
                    return Err(Error::NonFiniteInput { row, col });
                }
            }
        }
        let sigma = (&sigma + sigma.transpose()) * 0.5;
        let sigma_chol = linalg::cholesky_lower(&sigma)?;
        Ok(Self { mu, sigma_chol })
    }

    pub fn k(&self) -> usize {
        self.mu.len()
    }

    pub fn mu(&self) -> &DVector<f64> {
        &self.mu
    }
}

/// Known-parameter utility maximizer:
///
/// ```text
/// w = Σ⁻¹𝟏/(𝟏ᵀΣ⁻¹𝟏) + γ⁻¹ Rμ,   R = Σ⁻¹ − Σ⁻¹𝟏𝟏ᵀΣ⁻¹/(𝟏ᵀΣ⁻¹𝟏)
/// ```
///
/// with expected return 𝟏ᵀΣ⁻¹μ/(𝟏ᵀΣ⁻¹𝟏) + γ⁻¹ μᵀRμ and variance
/// 1/(𝟏ᵀΣ⁻¹𝟏) + γ⁻² μᵀRμ.
pub fn population_weights_gamma(
    params: &PopulationParams,
    gamma: f64,
) -> Result<PortfolioSolution> {
    check_gamma(gamma)?;
    let qi = QuadInputs::from_factor(&params.sigma_chol, &params.mu);
    Ok(PortfolioSolution {
        rule: Rule::PopulationGamma { gamma },
        weights: gmv_from(&qi) + &qi.q_dir / gamma,
        expected_return: r_gmv_from(&qi) + qi.excess_quad / gamma,
        variance: 1.0 / qi.one_quad + qi.excess_quad / (gamma * gamma),
    })
}
