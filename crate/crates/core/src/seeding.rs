//! Deterministic derivation of per-consumer RNG streams.
//!
//! Every random draw in the harness comes from a ChaCha8 stream keyed by the
//! master seed plus a tuple naming the consumer (grid cell, trial, task,
//! purpose tag). Streams therefore do not depend on worker count, scheduling,
//! or the order cells are visited in.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Purpose tags keeping streams for different uses of the same cell disjoint.
pub mod tag {
    pub const ENVIRONMENT: u64 = 1;
    pub const TRAIN: u64 = 2;
    pub const TEST: u64 = 3;
    pub const OPTIMIZER: u64 = 4;
    pub const NEW_TASK: u64 = 5;
    pub const COMPLEXITY: u64 = 6;
    pub const LOWER_BOUND: u64 = 7;
}

fn mix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Stable 64-bit hash of a master seed and a consumer tuple.
pub fn derive(master: u64, parts: &[u64]) -> u64 {
    let mut h = mix64(master ^ 0x6c62_272e_07bb_0142);
    for &p in parts {
        h = mix64(h ^ mix64(p));
    }
    h
}

/// ChaCha8 stream keyed by `(master, parts)`.
pub fn stream(master: u64, parts: &[u64]) -> ChaCha8Rng {
    let mut h = derive(master, parts);
    let mut seed = [0u8; 32];
    for chunk in seed.chunks_exact_mut(8) {
        h = mix64(h);
        chunk.copy_from_slice(&h.to_le_bytes());
    }
    ChaCha8Rng::from_seed(seed)
}
