//! Seeded stream splitting.
//!
//! Every run owns one base seed; each consumer of randomness draws from its
//! own ChaCha stream so that adding draws in one place never shifts another.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Principal reward noise.
pub const REWARD_STREAM: u64 = 1;
/// Uniform draws handed to bandit subroutines.
pub const SUBROUTINE_STREAM: u64 = 2;
/// Hit-and-run sampling and direction search.
pub const GEOMETRY_STREAM: u64 = 3;
/// Baseline-specific randomness (exploration amounts and the like).
pub const BASELINE_STREAM: u64 = 4;

pub fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Seed of the `index`-th run derived from a base seed (splitmix64 step).
pub fn derive_seed(base: u64, index: u64) -> u64 {
    let mut z = base.wrapping_add(index.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}
