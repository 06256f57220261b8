//! Small dense linear-algebra kernels shared by the moment and sampling
//! code: a Cholesky factorization with a scale-aware pivot test, and
//! triangular substitutions so S⁻¹-products never materialize an inverse.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// Relative pivot floor for the Cholesky factorization: a pivot is treated
/// as zero when it falls at or below `PIVOT_RTOL · trace(S)/k`.
pub(crate) const PIVOT_RTOL: f64 = 1e-12;

/// Lower-triangular Cholesky factor L with S = L Lᵀ.
///
/// Fails with [`Error::SingularScatter`] on the first pivot that is not
/// safely positive; the tolerance scales with the mean diagonal entry so
/// the test is invariant under S → αS.
pub(crate) fn cholesky_lower(s: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let k = s.nrows();
    debug_assert_eq!(k, s.ncols());
    let tolerance = PIVOT_RTOL * s.trace() / k as f64;
    let mut l = DMatrix::zeros(k, k);
    for j in 0..k {
        let mut pivot = s[(j, j)];
        for p in 0..j {
            pivot -= l[(j, p)] * l[(j, p)];
        }
        if pivot <= tolerance {
            return Err(Error::SingularScatter {
                index: j,
                pivot,
                tolerance,
            });
        }
        let ljj = pivot.sqrt();
        l[(j, j)] = ljj;
        for i in (j + 1)..k {
            let mut acc = s[(i, j)];
            for p in 0..j {
                acc -= l[(i, p)] * l[(j, p)];
            }
            l[(i, j)] = acc / ljj;
        }
    }
    Ok(l)
}

/// Solve L y = b for lower-triangular L.
pub(crate) fn forward_substitute(l: &DMatrix<f64>, b: &DVector<f64>) -> DVector<f64> {
    let k = l.nrows();
    let mut y = b.clone();
    for i in 0..k {
        let mut acc = y[i];
        for p in 0..i {
            acc -= l[(i, p)] * y[p];
        }
        y[i] = acc / l[(i, i)];
    }
    y
}

/// Solve Lᵀ x = y for lower-triangular L.
pub(crate) fn back_substitute_transposed(l: &DMatrix<f64>, y: &DVector<f64>) -> DVector<f64> {
    let k = l.nrows();
    let mut x = y.clone();
    for i in (0..k).rev() {
        let mut acc = x[i];
        for p in (i + 1)..k {
            acc -= l[(p, i)] * x[p];
        }
        x[i] = acc / l[(i, i)];
    }
    x
}

/// Solve S x = b through the factor L (forward then backward substitution).
pub(crate) fn solve_spd(l: &DMatrix<f64>, b: &DVector<f64>) -> DVector<f64> {
    back_substitute_transposed(l, &forward_substitute(l, b))
}
