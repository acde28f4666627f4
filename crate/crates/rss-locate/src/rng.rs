//! Deterministic pseudo-randomness.
//!
//! Every stochastic operation in the crate draws from [`SimRng`], a ChaCha8
//! stream cipher generator. Independent streams are derived from a base seed
//! and a list of integer tags (trial, epoch, purpose) with a splitmix64
//! mixer, so each trial and epoch owns its own stream no matter in which
//! order — or on how many threads — the work is executed.

use rand::{Rng as _, SeedableRng as _};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

fn splitmix64(state: u64) -> u64 {
    let mut z = state.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Mixes a base seed and stream tags into a derived seed.
pub fn derive_seed(base: u64, tags: &[u64]) -> u64 {
    let mut acc = splitmix64(base);
    for &tag in tags {
        acc = splitmix64(acc ^ splitmix64(tag));
    }
    acc
}

/// Seeded generator with uniform and standard-normal draws.
///
/// Identical seeds yield identical streams on every platform.
#[derive(Clone, Debug)]
pub struct SimRng {
    inner: ChaCha8Rng,
}

impl SimRng {
    pub fn from_seed(seed: u64) -> Self {
        Self {
            inner: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    /// Generator for the stream identified by `tags` under `base`.
    pub fn stream(base: u64, tags: &[u64]) -> Self {
        Self::from_seed(derive_seed(base, tags))
    }

    /// Uniform draw from `[lo, hi)`.
    pub fn uniform(&mut self, lo: f64, hi: f64) -> f64 {
        debug_assert!(lo < hi);
        lo + (hi - lo) * self.inner.random::<f64>()
    }

    /// Standard normal draw.
    pub fn standard_normal(&mut self) -> f64 {
        self.inner.sample(StandardNormal)
    }
}
