//! Seeding conventions.
//!
//! Every random stream in the crate is a ChaCha8 generator seeded from a
//! 64-bit value. ChaCha is counter based and its output is fixed across
//! platforms, so a seed reproduces the same draws everywhere. Independent
//! streams (replicates, retry attempts, pair choices) get their seeds from
//! [`derive_seed`], a SplitMix64 jump from the parent seed.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type Rng = ChaCha8Rng;

const GOLDEN_GAMMA: u64 = 0x9e37_79b9_7f4a_7c15;

/// SplitMix64 output function.
pub fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(GOLDEN_GAMMA);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Seed of child `index` on stream `stream` below `parent`.
///
/// `splitmix64(splitmix64(parent ^ stream) + index * GOLDEN_GAMMA)`.
pub fn derive_seed(parent: u64, stream: u64, index: u64) -> u64 {
    let base = splitmix64(parent ^ stream.wrapping_mul(0xd1b5_4a32_d192_ed03));
    splitmix64(base.wrapping_add(index.wrapping_mul(GOLDEN_GAMMA)))
}

pub fn rng_from_seed(seed: u64) -> Rng {
    ChaCha8Rng::seed_from_u64(seed)
}
