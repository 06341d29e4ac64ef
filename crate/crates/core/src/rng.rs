//! Seed derivation. Every random choice in the crate is drawn from a ChaCha stream whose
//! seed is derived from one user seed plus a fixed path of stream labels, so results do
//! not depend on evaluation order or thread count.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub const DEFAULT_SEED: u64 = 0x5eed_2024;

fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Child seed for `stream` under `seed`.
pub fn derive(seed: u64, stream: &[u64]) -> u64 {
    stream.iter().fold(splitmix(seed), |acc, &s| splitmix(acc ^ splitmix(s)))
}

pub fn stream_rng(seed: u64, stream: &[u64]) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(derive(seed, stream))
}

/// Stream labels, kept distinct so independent consumers never share randomness.
pub mod streams {
    pub const RANK: u64 = 1;
    pub const SPANNING: u64 = 2;
    pub const REALISATION: u64 = 3;
    pub const GAMMA: u64 = 4;
    pub const PATCH: u64 = 5;
    pub const REAL_SAMPLES: u64 = 6;
    pub const RESTART: u64 = 7;
    pub const CERTIFICATE: u64 = 8;
}
