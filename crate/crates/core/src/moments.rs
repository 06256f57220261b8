//! Sample moments of an asset-return window and the scalar coefficients
//! that separate the Bayesian posterior rules from their sample
//! counterparts.
//!
//! For a window of n return vectors x₁, …, xₙ ∈ ℝᵏ the summary keeps
//!
//! * the sample mean x̄ = (1/n) Σ xᵢ,
//! * the **unnormalized** scatter matrix S = Σ (xᵢ − x̄)(xᵢ − x̄)ᵀ,
//!
//! together with a lower Cholesky factor of S when n > k. All downstream
//! quantities (optimal weights, frontiers, predictive draws) are functions
//! of x̄, S and the pair of constants
//!
//! ```text
//! c(k, n) = 1/(n−k−1) + (2n−k−1) / (n (n−k−1)(n−k−2))      (posterior)
//! d(n)    = 1/(n−1)                                          (sample)
//! ```
//!
//! with c > d always: the posterior predictive variance inflates the naive
//! sample estimate to account for parameter uncertainty. The projection
//!
//! ```text
//! Q = S⁻¹ − S⁻¹𝟏𝟏ᵀS⁻¹ / (𝟏ᵀS⁻¹𝟏)
//! ```
//!
//! maps the mean into the self-financing direction traded against the
//! global minimum-variance portfolio; it satisfies Q𝟏 = 0 and QSQ = Q.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::linalg;

/// A window of n observations of k asset returns, one observation per row.
///
/// Labels are opaque column names carried through to reports, and periods
/// are opaque per-row timestamps; ordering is positional and nothing is
/// parsed out of either.
#[derive(Debug, Clone, PartialEq)]
pub struct ReturnsWindow {
    data: DMatrix<f64>,
    labels: Option<Vec<String>>,
    periods: Option<Vec<String>>,
}

impl ReturnsWindow {
    /// Wrap an n×k matrix of simple returns.
    ///
    /// Every entry must be finite; the first offending entry is reported
    /// with zero-based row/column indices.
    pub fn new(data: DMatrix<f64>) -> Result<Self> {
        if data.ncols() == 0 {
            return Err(Error::DimensionMismatch {
                expected: 1,
                got: 0,
            });
        }
        for row in 0..data.nrows() {
            for col in 0..data.ncols() {
                if !data[(row, col)].is_finite() {
                    return Err(Error::NonFiniteInput { row, col });
                }
            }
        }
        Ok(Self {
            data,
            labels: None,
            periods: None,
        })
    }

    /// Build a window from row slices; all rows must have equal length.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let k = rows.first().map_or(0, Vec::len);
        for row in rows {
            if row.len() != k {
                return Err(Error::DimensionMismatch {
                    expected: k,
                    got: row.len(),
                });
            }
        }
        let data = DMatrix::from_row_iterator(rows.len(), k, rows.iter().flatten().copied());
        Self::new(data)
    }

    /// Attach one label per asset column.
    pub fn with_labels(mut self, labels: Vec<String>) -> Result<Self> {
        if labels.len() != self.k() {
            return Err(Error::DimensionMismatch {
                expected: self.k(),
                got: labels.len(),
            });
        }
        self.labels = Some(labels);
        Ok(self)
    }

    /// Attach one timestamp per observation row.
    pub fn with_periods(mut self, periods: Vec<String>) -> Result<Self> {
        if periods.len() != self.n() {
            return Err(Error::DimensionMismatch {
                expected: self.n(),
                got: periods.len(),
            });
        }
        self.periods = Some(periods);
        Ok(self)
    }

    pub fn n(&self) -> usize {
        self.data.nrows()
    }

    pub fn k(&self) -> usize {
        self.data.ncols()
    }

    pub fn data(&self) -> &DMatrix<f64> {
        &self.data
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }

    pub fn periods(&self) -> Option<&[String]> {
        self.periods.as_deref()
    }
}

/// Sample mean, unnormalized scatter and (when n > k) a cached Cholesky
/// factor of the scatter. Produced by [`estimate_moments`].
#[derive(Debug, Clone)]
pub struct MomentSummary {
    n: usize,
    mean: DVector<f64>,
    scatter: DMatrix<f64>,
    chol: Option<DMatrix<f64>>,
    labels: Option<Vec<String>>,
}

/// Compute mean and scatter of a window.
///
/// Needs n ≥ 2. The scatter is symmetrized as (S + Sᵀ)/2 to scrub
/// accumulation asymmetry before factoring. Factorization is attempted
/// only when n > k (otherwise S is rank-deficient by construction and the
/// summary is still valid for inspection); a factorization failure means
/// the returns are linearly degenerate and surfaces as
/// [`Error::SingularScatter`].
pub fn estimate_moments(window: &ReturnsWindow) -> Result<MomentSummary> {
    let n = window.n();
    let k = window.k();
    if n < 2 {
        return Err(Error::WindowTooSmall { n });
    }
    let data = window.data();
    let mean = data.row_mean().transpose();
    let mut centered = data.clone();
    for mut row in centered.row_iter_mut() {
        row -= mean.transpose();
    }
    let mut scatter = centered.transpose() * &centered;
    // Exact symmetry: downstream factorizations assume it.
    scatter = (&scatter + scatter.transpose()) * 0.5;

    let chol = if n > k {
        Some(linalg::cholesky_lower(&scatter)?)
    } else {
        None
    };

    Ok(MomentSummary {
        n,
        mean,
        scatter,
        chol,
        labels: window.labels().map(<[String]>::to_vec),
    })
}

impl MomentSummary {
    /// Assemble a summary directly from a mean vector, scatter matrix and
    /// nominal sample size, bypassing raw data. Intended for synthetic
    /// inputs; the scatter is symmetrized and factored under the same
    /// rules as [`estimate_moments`].
    pub fn from_parts(mean: DVector<f64>, scatter: DMatrix<f64>, n: usize) -> Result<Self> {
        let k = mean.len();
        if scatter.nrows() != k || scatter.ncols() != k {
            return Err(Error::DimensionMismatch {
                expected: k,
                got: scatter.nrows().max(scatter.ncols()),
            });
        }
        if n < 2 {
            return Err(Error::WindowTooSmall { n });
        }
        for (i, v) in mean.iter().enumerate() {
            if !v.is_finite() {
                return Err(Error::NonFiniteInput { row: 0, col: i });
            }
        }
        for row in 0..k {
            for col in 0..k {
                if !scatter[(row, col)].is_finite() {
                    return Err(Error::NonFiniteInput { row, col });
                }
            }
        }
        let scatter = (&scatter + scatter.transpose()) * 0.5;
        let chol = if n > k {
            Some(linalg::cholesky_lower(&scatter)?)
        } else {
            None
        };
        Ok(Self {
            n,
            mean,
            scatter,
            chol,
            labels: None,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.mean.len()
    }

    pub fn mean(&self) -> &DVector<f64> {
        &self.mean
    }

    pub fn scatter(&self) -> &DMatrix<f64> {
        &self.scatter
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }

    /// The coefficient pair for this window's (k, n).
    pub fn coefficients(&self) -> Result<Coefficients> {
        coefficients(self.k(), self.n)
    }

    /// Lower Cholesky factor of S; present only when n > k.
    pub(crate) fn chol(&self) -> Result<&DMatrix<f64>> {
        self.chol.as_ref().ok_or(Error::DegreesOfFreedom {
            k: self.k(),
            n: self.n,
            needed: self.k() + 1,
        })
    }

    /// The handful of S⁻¹-quadratics every closed-form rule is built from.
    pub(crate) fn quad_inputs(&self) -> Result<QuadInputs> {
        Ok(QuadInputs::from_factor(self.chol()?, &self.mean))
    }
}

/// Inner products with S⁻¹ shared by the portfolio and frontier formulas.
#[derive(Debug, Clone)]
pub(crate) struct QuadInputs {
    /// S⁻¹𝟏.
    pub s_inv_one: DVector<f64>,
    /// 𝟏ᵀS⁻¹𝟏.
    pub one_quad: f64,
    /// 𝟏ᵀS⁻¹x̄.
    pub mean_one_quad: f64,
    /// x̄ᵀQx̄.
    pub excess_quad: f64,
    /// Qx̄ = S⁻¹x̄ − (𝟏ᵀS⁻¹x̄ / 𝟏ᵀS⁻¹𝟏) S⁻¹𝟏.
    pub q_dir: DVector<f64>,
}

impl QuadInputs {
    /// Evaluate the quadratics for any SPD matrix given by its lower
    /// Cholesky factor, with `mean` as the location vector.
    pub(crate) fn from_factor(l: &DMatrix<f64>, mean: &DVector<f64>) -> Self {
        let k = mean.len();
        let ones = DVector::from_element(k, 1.0);
        let s_inv_one = linalg::solve_spd(l, &ones);
        let s_inv_mean = linalg::solve_spd(l, mean);
        let one_quad = ones.dot(&s_inv_one);
        let mean_one_quad = ones.dot(&s_inv_mean);
        // x̄ᵀQx̄ = x̄ᵀS⁻¹x̄ − (𝟏ᵀS⁻¹x̄)²/(𝟏ᵀS⁻¹𝟏); ≥ 0 analytically, may
        // round to a tiny negative when x̄ ∥ 𝟏.
        let excess_quad = mean.dot(&s_inv_mean) - mean_one_quad * mean_one_quad / one_quad;
        let q_dir = &s_inv_mean - &s_inv_one * (mean_one_quad / one_quad);
        Self {
            s_inv_one,
            one_quad,
            mean_one_quad,
            excess_quad,
            q_dir,
        }
    }
}

/// The variance coefficients attached to a window of size n with k assets:
/// `c` scales the posterior-predictive rules, `d = 1/(n−1)` the sample
/// rules. Requires n > k + 2.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Coefficients {
    pub c: f64,
    pub d: f64,
}

impl Coefficients {
    /// c/d, the variance inflation the posterior applies on top of the
    /// sample estimator; > 1 always, increasing in k, decreasing in n.
    pub fn ratio(&self) -> f64 {
        self.c / self.d
    }
}

/// Compute c(k, n) and d(n). Needs k ≥ 1 and n > k + 2 so that both
/// denominators of c are positive.
pub fn coefficients(k: usize, n: usize) -> Result<Coefficients> {
    if k == 0 {
        return Err(Error::DimensionMismatch {
            expected: 1,
            got: 0,
        });
    }
    if n <= k + 2 {
        return Err(Error::DegreesOfFreedom {
            k,
            n,
            needed: k + 3,
        });
    }
    let (nf, kf) = (n as f64, k as f64);
    let c = 1.0 / (nf - kf - 1.0)
        + (2.0 * nf - kf - 1.0) / (nf * (nf - kf - 1.0) * (nf - kf - 2.0));
    let d = 1.0 / (nf - 1.0);
    Ok(Coefficients { c, d })
}

/// Materialize Q = S⁻¹ − S⁻¹𝟏𝟏ᵀS⁻¹/(𝟏ᵀS⁻¹𝟏) explicitly.
///
/// The closed-form rules never need the full matrix (they use Qx̄ via
/// triangular solves); this is for inspection and validation. Requires
/// n > k.
pub fn q_matrix(summary: &MomentSummary) -> Result<DMatrix<f64>> {
    let k = summary.k();
    let l = summary.chol()?;
    // Columns of S⁻¹ by solving against the identity.
    let mut s_inv = DMatrix::zeros(k, k);
    for j in 0..k {
        let e = DVector::from_fn(k, |i, _| if i == j { 1.0 } else { 0.0 });
        s_inv.set_column(j, &linalg::solve_spd(l, &e));
    }
    let ones = DVector::from_element(k, 1.0);
    let u = &s_inv * &ones;
    let a = ones.dot(&u);
    let mut q = s_inv - (&u * u.transpose()) / a;
    q = (&q + q.transpose()) * 0.5;
    Ok(q)
}
