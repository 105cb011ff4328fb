//! Reproducible random streams for Monte Carlo trials.
//!
//! Every trial draws from its own ChaCha8 stream: the 64-bit seed is expanded into a
//! 256-bit key with `rand_core`'s `seed_from_u64` (PCG32-based), and the trial index is the
//! ChaCha stream id. ChaCha is counter-based, so trial `t` yields the same numbers whatever
//! order or thread the trials run in. Uniforms use the top 53 bits of `next_u64`.

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

/// Identifier written into reports next to every seed.
pub const RNG_ALGORITHM_ID: &str = "chacha8-stream/seed_from_u64/u53";

#[derive(Debug, Clone)]
pub struct TrialRng {
    inner: ChaCha8Rng,
}

impl TrialRng {
    pub fn new(seed: u64, stream: u64) -> Self {
        let mut inner = ChaCha8Rng::seed_from_u64(seed);
        inner.set_stream(stream);
        Self { inner }
    }

    /// Uniform draw from `[0, 1)`.
    pub fn uniform(&mut self) -> f64 {
        (self.inner.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    pub fn next_u64(&mut self) -> u64 {
        self.inner.next_u64()
    }
}
