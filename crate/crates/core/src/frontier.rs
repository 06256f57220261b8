//! Efficient frontiers in (variance, expected return) space.
//!
//! Both the posterior-predictive and the sample frontier are upward
//! parabolas in variance,
//!
//! ```text
//! (R − r_gmv)² = slope · (V − v_gmv),
//! ```
//!
//! sharing the vertex return r_gmv = 𝟏ᵀS⁻¹x̄ / 𝟏ᵀS⁻¹𝟏 but differing in the
//! vertex variance and slope: v_gmv = c/𝟏ᵀS⁻¹𝟏, slope = x̄ᵀQx̄/c for the
//! Bayes family and the same expressions with d = 1/(n−1) for the sample
//! family. Since c > d, the Bayes frontier sits to the right (more
//! variance at the vertex) and opens more slowly — the sample frontier
//! overstates what is attainable because it prices in no estimation risk.

use crate::error::{Error, Result};
use crate::moments::MomentSummary;

/// Which coefficient scales the predictive variance.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Family {
    /// Posterior predictive: variance coefficient c(k, n); needs n > k+2.
    Bayes,
    /// Plug-in sample estimate: coefficient d = 1/(n−1); needs n > k.
    Sample,
}

/// Vertex and opening of one frontier parabola.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrontierParams {
    pub family: Family,
    pub r_gmv: f64,
    pub v_gmv: f64,
    pub slope: f64,
}

/// Compute the frontier parabola of a window for one family.
pub fn efficient_frontier(summary: &MomentSummary, family: Family) -> Result<FrontierParams> {
    let qi = summary.quad_inputs()?;
    let coef = match family {
        Family::Bayes => summary.coefficients()?.c,
        Family::Sample => 1.0 / (summary.n() as f64 - 1.0),
    };
    Ok(FrontierParams {
        family,
        r_gmv: qi.mean_one_quad / qi.one_quad,
        v_gmv: coef / qi.one_quad,
        // x̄ᵀQx̄ ≥ 0 analytically; scrub the tiny negative a degenerate
        // mean can round to.
        slope: qi.excess_quad.max(0.0) / coef,
    })
}

impl FrontierParams {
    /// Upper-branch return at variance v ≥ v_gmv:
    /// r_gmv + sqrt(slope · (v − v_gmv)).
    pub fn return_at(&self, v: f64) -> Result<f64> {
        if v < self.v_gmv || v.is_nan() {
            return Err(Error::InfeasibleVariance {
                v0: v,
                minimum: self.v_gmv,
            });
        }
        Ok(self.r_gmv + (self.slope * (v - self.v_gmv)).sqrt())
    }

    /// Variance required for expected return r (either branch):
    /// v_gmv + (r − r_gmv)²/slope. Degenerate (slope 0) frontiers support
    /// no return other than r_gmv.
    pub fn variance_at(&self, r: f64) -> Result<f64> {
        let gap = r - self.r_gmv;
        if self.slope == 0.0 {
            if gap == 0.0 {
                return Ok(self.v_gmv);
            }
            return Err(Error::DegenerateFrontier);
        }
        Ok(self.v_gmv + gap * gap / self.slope)
    }

    /// Evaluate the upper branch on an evenly spaced variance grid from
    /// v_gmv to v_max (inclusive). `points == 1` yields just the vertex.
    pub fn grid_to(&self, v_max: f64, points: usize) -> Vec<(f64, f64)> {
        if points == 0 {
            return Vec::new();
        }
        if points == 1 {
            return vec![(self.v_gmv, self.r_gmv)];
        }
        let span = v_max - self.v_gmv;
        (0..points)
            .map(|i| {
                let v = self.v_gmv + span * i as f64 / (points - 1) as f64;
                // Grid points are ≥ v_gmv by construction.
                (v, self.return_at(v).expect("grid point below vertex"))
            })
            .collect()
    }

    /// The default report grid: 100 points spanning [v_gmv, 5·v_gmv].
    pub fn grid(&self, points: usize) -> Vec<(f64, f64)> {
        self.grid_to(5.0 * self.v_gmv, points)
    }
}
