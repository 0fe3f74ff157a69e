//! Reproducible random streams.
//!
//! Every stream is a ChaCha8 generator (a counter-based stream cipher) seeded
//! through `SeedableRng::seed_from_u64`. The output for a given seed is fixed
//! by the `rand_chacha` crate and does not depend on platform or word size.
//! Derived streams (per trial, per codeword) are seeded with a SplitMix64 mix
//! of the parent seed and the index.

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// A single-owner deterministic random stream.
#[derive(Debug, Clone)]
pub struct RandomStream(ChaCha8Rng);

impl RandomStream {
    /// Uniform draw in `[0, 1)` with 53 random bits.
    pub fn uniform(&mut self) -> f64 {
        (self.0.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform draw in `(0, 1]`.
    pub fn uniform_open0(&mut self) -> f64 {
        1.0 - self.uniform()
    }
}

impl RngCore for RandomStream {
    fn next_u32(&mut self) -> u32 {
        self.0.next_u32()
    }

    fn next_u64(&mut self) -> u64 {
        self.0.next_u64()
    }

    fn fill_bytes(&mut self, dst: &mut [u8]) {
        self.0.fill_bytes(dst)
    }
}

pub fn make_rng(seed: u64) -> RandomStream {
    RandomStream(ChaCha8Rng::seed_from_u64(seed))
}

/// SplitMix64 finalizer.
pub fn mix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Seed for the `index`-th child of `seed`.
pub fn derive_seed(seed: u64, index: u64) -> u64 {
    mix64(seed ^ mix64(index.wrapping_add(0x5851_f42d_4c95_7f2d)))
}
