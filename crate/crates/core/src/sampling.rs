//! Seeded randomness: counter-split ChaCha streams and exact scalar
//! samplers for the chi-square and Student-t draws the predictive layer
//! consumes.
//!
//! # Stream layout
//!
//! All randomness in a run derives from one u64 seed. Draw index i of a
//! sampler owns the ChaCha12 stream `tag | i`, where the tag occupies the
//! bits above [`INDEX_BITS`] and distinguishes sampler kinds. Inside a
//! stream the consumption order is fixed by the sampler, so
//!
//! * draw i never changes when the total draw count b changes
//!   (prefix stability), and
//! * any partition of indices across threads produces identical output
//!   (thread-count invariance).
//!
//! # Samplers
//!
//! Chi-square draws with small integer dof (≤ [`SUM_OF_SQUARES_MAX_DOF`])
//! sum squared standard normals — the textbook construction, exact and
//! transparent. Larger or non-integer dof use the Marsaglia–Tsang
//! rejection sampler for Gamma(ν/2, 2), which is also exact and costs
//! O(1) uniforms/normals per draw instead of O(ν); the cutoff is purely a
//! performance choice. Student-t combines one standard normal with one
//! chi-square: t = z / sqrt(χ²_ν / ν).

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;
use rand_distr::StandardNormal;

/// Bits of the stream id reserved for the draw index.
pub(crate) const INDEX_BITS: u32 = 48;

/// Stream tag for Theorem-style direct predictive draws.
pub(crate) const TAG_REPRESENTATION: u64 = 1 << INDEX_BITS;

/// Stream tag for the hierarchical reference sampler.
pub(crate) const TAG_ORACLE: u64 = 2 << INDEX_BITS;

/// Largest integer dof handled by the sum-of-squares chi-square path.
pub(crate) const SUM_OF_SQUARES_MAX_DOF: f64 = 16.0;

/// The base generator for a seed; per-draw streams are split off it.
pub(crate) fn base_rng(seed: u64) -> ChaCha12Rng {
    ChaCha12Rng::seed_from_u64(seed)
}

/// The generator owning stream `tag | index`.
pub(crate) fn substream(base: &ChaCha12Rng, tag: u64, index: u64) -> ChaCha12Rng {
    debug_assert!(index < (1 << INDEX_BITS));
    let mut rng = base.clone();
    rng.set_stream(tag | index);
    rng
}

/// One draw from Gamma(shape, scale) by Marsaglia–Tsang squeeze/rejection
/// (with the standard u^(1/α) boost below shape 1). Exact.
fn gamma_draw<R: Rng + ?Sized>(shape: f64, scale: f64, rng: &mut R) -> f64 {
    debug_assert!(shape > 0.0 && scale > 0.0);
    if shape < 1.0 {
        let boosted = gamma_draw(shape + 1.0, scale, rng);
        let u: f64 = rng.random();
        return boosted * u.powf(1.0 / shape);
    }
    let d = shape - 1.0 / 3.0;
    let c = 1.0 / (3.0 * d.sqrt());
    loop {
        let x: f64 = rng.sample(StandardNormal);
        let t = 1.0 + c * x;
        if t <= 0.0 {
            continue;
        }
        let v = t * t * t;
        let u: f64 = rng.random();
        let x2 = x * x;
        if u < 1.0 - 0.0331 * x2 * x2 {
            return d * v * scale;
        }
        if u.ln() < 0.5 * x2 + d * (1.0 - v + v.ln()) {
            return d * v * scale;
        }
    }
}

/// One chi-square draw with ν > 0 degrees of freedom (ν need not be an
/// integer).
pub(crate) fn chi_square_draw<R: Rng + ?Sized>(nu: f64, rng: &mut R) -> f64 {
    debug_assert!(nu > 0.0);
    if nu.fract() == 0.0 && nu <= SUM_OF_SQUARES_MAX_DOF {
        let mut acc = 0.0;
        for _ in 0..nu as u32 {
            let z: f64 = rng.sample(StandardNormal);
            acc += z * z;
        }
        acc
    } else {
        gamma_draw(0.5 * nu, 2.0, rng)
    }
}

/// One Student-t draw with ν > 0 degrees of freedom: z / sqrt(χ²_ν / ν),
/// consuming the normal first, then the chi-square.
pub fn student_t_draw<R: Rng + ?Sized>(nu: f64, rng: &mut R) -> f64 {
    assert!(
        nu > 0.0 && nu.is_finite(),
        "degrees of freedom must be positive and finite, got {nu}"
    );
    let z: f64 = rng.sample(StandardNormal);
    let chi = chi_square_draw(nu, rng);
    z / (chi / nu).sqrt()
}
