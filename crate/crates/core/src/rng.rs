//! Counter-based random streams for reproducible rollouts.
//!
//! Every random draw in a rollout comes from a ChaCha8 keystream keyed by the
//! rollout seed and selected by a stream id, so initial conditions, gusts,
//! sensor noise and policy noise never share state. A rollout's seed is a
//! fixed mix of `(base_seed, rollout_index)`, which makes any rollout
//! reproducible on its own without replaying its predecessors.

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

/// Disjoint random streams used inside one rollout.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[repr(u64)]
pub enum Stream {
    Condition = 1,
    Gust = 2,
    Sensor = 3,
    Policy = 4,
    Outcome = 5,
}

const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;

/// SplitMix64 finalizer.
pub fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed of rollout `index` under `base_seed`.
pub fn rollout_seed(base_seed: u64, index: u64) -> u64 {
    mix64(base_seed.wrapping_add(mix64(index.wrapping_add(1).wrapping_mul(GOLDEN))))
}

/// Derived seed for a labelled sub-experiment (ladder member, grid cell, ...).
pub fn child_seed(base_seed: u64, label: u64) -> u64 {
    mix64(base_seed ^ mix64(label.wrapping_mul(GOLDEN) ^ 0xA5A5_A5A5_A5A5_A5A5))
}

#[derive(Debug, Clone)]
pub struct StreamRng {
    inner: ChaCha8Rng,
}

impl StreamRng {
    pub fn new(seed: u64, stream: Stream) -> Self {
        let mut key = [0u8; 32];
        key[..8].copy_from_slice(&seed.to_le_bytes());
        key[8..16].copy_from_slice(&mix64(seed).to_le_bytes());
        let mut inner = ChaCha8Rng::from_seed(key);
        inner.set_stream(stream as u64);
        Self { inner }
    }

    /// Uniform in `[0, 1)`.
    pub fn unit(&mut self) -> f64 {
        self.inner.random::<f64>()
    }

    /// Uniform in `[lo, hi]`; returns `lo` exactly when the range is degenerate.
    pub fn uniform(&mut self, lo: f64, hi: f64) -> f64 {
        if hi <= lo {
            return lo;
        }
        lo + (hi - lo) * self.unit()
    }

    /// Zero-mean Gaussian; consumes no randomness when `sd == 0`.
    pub fn normal(&mut self, sd: f64) -> f64 {
        if sd == 0.0 {
            return 0.0;
        }
        let z: f64 = self.inner.sample(StandardNormal);
        sd * z
    }

    pub fn bernoulli(&mut self, p: f64) -> bool {
        self.unit() < p
    }

    pub fn next_u64(&mut self) -> u64 {
        self.inner.next_u64()
    }
}
