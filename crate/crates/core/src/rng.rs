//! Seeded random streams.
//!
//! A run owns one master seed. Each `(parent, generation)` pair gets its own
//! ChaCha stream keyed from the seed, so work on different parents can be
//! scheduled in any order without changing results.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type Stream = ChaCha8Rng;

/// Stream for `parent` at `generation`. Generation 0 is initialization.
pub fn stream(seed: u64, parent: usize, generation: u64) -> Stream {
    let mut key = [0u8; 32];
    key[..8].copy_from_slice(&seed.to_le_bytes());
    key[8..16].copy_from_slice(&(parent as u64).to_le_bytes());
    key[16..24].copy_from_slice(&generation.to_le_bytes());
    key[24..].copy_from_slice(b"evoshape");
    ChaCha8Rng::from_seed(key)
}
