//! Order statistics and distribution-comparison helpers used by the
//! credible-interval code and the sampler validation suites.

/// Linear-interpolation empirical quantile (the common "type 7" rule):
/// for B sorted values and probability p, the fractional rank is
/// h = p·(B−1) and the result interpolates between the neighbors of h.
///
/// `sorted` must be ascending (not checked beyond debug builds) and
/// nonempty; p must lie in [0, 1].
pub fn empirical_quantile(sorted: &[f64], p: f64) -> f64 {
    assert!(!sorted.is_empty(), "quantile of an empty sample");
    assert!((0.0..=1.0).contains(&p), "p out of [0, 1]: {p}");
    debug_assert!(sorted.windows(2).all(|w| w[0] <= w[1]));
    let h = p * (sorted.len() - 1) as f64;
    let lo = h.floor() as usize;
    let frac = h - lo as f64;
    if lo + 1 >= sorted.len() {
        sorted[sorted.len() - 1]
    } else {
        sorted[lo] + frac * (sorted[lo + 1] - sorted[lo])
    }
}

/// Two-sample Kolmogorov–Smirnov statistic
/// D = sup_x |F̂₁(x) − F̂₂(x)|, with ties handled by evaluating the gap
/// only after both empirical CDFs have absorbed every copy of a value.
pub fn two_sample_ks(xs: &[f64], ys: &[f64]) -> f64 {
    assert!(!xs.is_empty() && !ys.is_empty(), "KS needs nonempty samples");
    let mut xs = xs.to_vec();
    let mut ys = ys.to_vec();
    xs.sort_unstable_by(f64::total_cmp);
    ys.sort_unstable_by(f64::total_cmp);
    let (n, m) = (xs.len() as f64, ys.len() as f64);
    let (mut i, mut j) = (0usize, 0usize);
    let mut d: f64 = 0.0;
    while i < xs.len() && j < ys.len() {
        let v = xs[i].min(ys[j]);
        while i < xs.len() && xs[i] == v {
            i += 1;
        }
        while j < ys.len() && ys[j] == v {
            j += 1;
        }
        d = d.max((i as f64 / n - j as f64 / m).abs());
    }
    // Once one sample is exhausted the gap can only shrink, and the state
    // at exhaustion was already evaluated inside the loop.
    d
}

pub fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Unbiased (n−1) sample variance.
pub fn variance(xs: &[f64]) -> f64 {
    let m = mean(xs);
    xs.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (xs.len() - 1) as f64
}

fn central_moment(xs: &[f64], m: f64, order: i32) -> f64 {
    xs.iter().map(|x| (x - m).powi(order)).sum::<f64>() / xs.len() as f64
}

/// Standardized third central moment.
pub fn skewness(xs: &[f64]) -> f64 {
    let m = mean(xs);
    let m2 = central_moment(xs, m, 2);
    central_moment(xs, m, 3) / m2.powf(1.5)
}

/// Standardized fourth central moment (3 for a normal distribution).
pub fn kurtosis(xs: &[f64]) -> f64 {
    let m = mean(xs);
    let m2 = central_moment(xs, m, 2);
    central_moment(xs, m, 4) / (m2 * m2)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn quantile_on_permuted_integers() {
        // 1..=101 shuffled: the 5% and 95% cut points land exactly on
        // ranks 6 and 96.
        let mut values: Vec<f64> = (1..=101).map(f64::from).collect();
        // Fixed permutation: stride through the list.
        let mut shuffled = Vec::with_capacity(101);
        let mut idx = 0usize;
        for _ in 0..101 {
            shuffled.push(values[idx]);
            idx = (idx + 37) % 101;
        }
        values.sort_unstable_by(f64::total_cmp);
        let mut sorted = shuffled.clone();
        sorted.sort_unstable_by(f64::total_cmp);
        assert_eq!(sorted, values);
        assert_eq!(empirical_quantile(&sorted, 0.05), 6.0);
        assert_eq!(empirical_quantile(&sorted, 0.95), 96.0);
        assert_eq!(empirical_quantile(&sorted, 0.0), 1.0);
        assert_eq!(empirical_quantile(&sorted, 1.0), 101.0);
    }

    #[test]
    fn quantile_interpolates() {
        let sorted = [0.0, 10.0];
        assert_relative_eq!(empirical_quantile(&sorted, 0.25), 2.5);
        let sorted = [1.0, 2.0, 4.0];
        assert_relative_eq!(empirical_quantile(&sorted, 0.75), 3.0);
    }

    #[test]
    fn ks_hand_cases() {
        assert_eq!(two_sample_ks(&[1.0, 2.0, 3.0], &[1.0, 2.0, 3.0]), 0.0);
        assert_eq!(two_sample_ks(&[1.0, 2.0], &[5.0, 6.0]), 1.0);
        assert_relative_eq!(
            two_sample_ks(&[1.0, 2.0, 3.0], &[1.5, 2.5, 3.5]),
            1.0 / 3.0
        );
        // Cross-sample ties.
        assert_relative_eq!(
            two_sample_ks(&[1.0, 1.0, 2.0], &[1.0, 3.0, 3.0]),
            2.0 / 3.0
        );
    }

    #[test]
    fn moment_helpers() {
        let xs = [2.0, 4.0, 4.0, 4.0, 5.0, 5.0, 7.0, 9.0];
        assert_relative_eq!(mean(&xs), 5.0);
        assert_relative_eq!(variance(&xs), 32.0 / 7.0);
        // Symmetric sample has zero skew.
        let sym = [-2.0, -1.0, 0.0, 1.0, 2.0];
        assert_relative_eq!(skewness(&sym), 0.0);
        // m2 = 2, m4 = 6.8 → kurtosis 1.7.
        assert_relative_eq!(kurtosis(&sym), 1.7);
    }
}
