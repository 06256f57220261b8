//! Deterministic random fixtures shared by the unit tests.

use nalgebra::DMatrix;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;
use rand_distr::StandardNormal;

use crate::moments::{estimate_moments, MomentSummary, ReturnsWindow};

/// An n×k window of mildly correlated returns with per-asset mean offsets,
/// full rank with probability one.
pub(crate) fn random_window(n: usize, k: usize, seed: u64) -> ReturnsWindow {
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let common: Vec<f64> = (0..n)
        .map(|_| rng.sample::<f64, _>(StandardNormal) * 0.01)
        .collect();
    let data = DMatrix::from_fn(n, k, |t, j| {
        let idio: f64 = rng.sample(StandardNormal);
        0.002 * (j as f64 + 1.0) / k as f64 + common[t] + 0.02 * idio
    });
    ReturnsWindow::new(data).unwrap()
}

pub(crate) fn random_summary(n: usize, k: usize, seed: u64) -> MomentSummary {
    estimate_moments(&random_window(n, k, seed)).unwrap()
}
