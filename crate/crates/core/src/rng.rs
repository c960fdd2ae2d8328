//! Seed-stream derivation and portable primitive draws.
//!
//! Every random quantity in the toolkit comes from a `ChaCha8` generator
//! seeded through [`stream`]. A base seed is split into independent streams
//! by mixing a stream tag through SplitMix64, so adding a draw to one field
//! (say, the return vector) never shifts the draws of another (the
//! covariance structure). Distribution sampling is hand-rolled on top of
//! `next_u64` so generated bytes do not depend on the sampling algorithms of
//! any external crate version.

use rand::RngCore;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Independent per-field streams derived from one instance seed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StreamTag {
    /// Expected-return vector draws.
    Mu = 1,
    /// Diagonal variance draws.
    Variance = 2,
    /// Covariance structure (noise placement, signs, Wishart factor).
    Structure = 3,
    /// Previous-portfolio selection.
    PrevPortfolio = 4,
    /// Solver-internal randomness (initial states, proposals).
    Solver = 5,
    /// Bootstrap resampling.
    Bootstrap = 6,
}

fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9E3779B97F4A7C15);
    let mut z = x;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58476D1CE4E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D049BB133111EB);
    z ^ (z >> 31)
}

/// Derive the generator for `(base_seed, tag)`. A third mixing word lets
/// callers fan out further (per-read, per-resample) without correlation.
pub fn stream(base_seed: u64, tag: StreamTag, lane: u64) -> ChaCha8Rng {
    let mixed = splitmix64(base_seed ^ splitmix64((tag as u64).wrapping_add(lane << 8)));
    ChaCha8Rng::seed_from_u64(mixed)
}

/// Uniform draw in `[0, 1)` with 53-bit resolution.
pub fn uniform(rng: &mut ChaCha8Rng) -> f64 {
    (rng.next_u64() >> 11) as f64 * (1.0 / 9_007_199_254_740_992.0)
}

/// Uniform draw in `[lo, hi)`.
pub fn uniform_in(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> f64 {
    lo + (hi - lo) * uniform(rng)
}

/// Standard normal via Box-Muller. Two uniforms per draw, no spare caching,
/// so the draw count per field is a fixed function of the instance shape.
pub fn normal(rng: &mut ChaCha8Rng) -> f64 {
    let mut u1 = uniform(rng);
    while u1 == 0.0 {
        u1 = uniform(rng);
    }
    let u2 = uniform(rng);
    (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
}

/// Unbiased uniform index in `[0, bound)` by rejection.
pub fn uniform_index(rng: &mut ChaCha8Rng, bound: usize) -> usize {
    assert!(bound > 0, "uniform_index bound must be positive");
    let bound = bound as u64;
    let zone = u64::MAX - (u64::MAX % bound);
    loop {
        let v = rng.next_u64();
        if v < zone {
            return (v % bound) as usize;
        }
    }
}

/// First `take` positions of a seeded Fisher-Yates shuffle of `0..n`.
pub fn choose_indices(rng: &mut ChaCha8Rng, n: usize, take: usize) -> Vec<usize> {
    assert!(take <= n);
    let mut idx: Vec<usize> = (0..n).collect();
    for i in 0..take {
        let j = i + uniform_index(rng, n - i);
        idx.swap(i, j);
    }
    idx.truncate(take);
    idx
}
