//! Seed derivation and counter-based random streams.
//!
//! Every random draw in the crate comes from a ChaCha8 stream keyed by a
//! 64-bit seed and selected by a 64-bit stream id, so work can be split across
//! threads without changing results.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// SplitMix64 finalizer.
pub fn mix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Derives a child seed from a parent seed and a path of indices.
pub fn derive_seed(parent: u64, path: &[u64]) -> u64 {
    path.iter()
        .fold(mix64(parent), |acc, &p| mix64(acc ^ mix64(p.wrapping_add(0x632B_E59B_D9B4_E019))))
}

/// A ChaCha8 generator positioned at the start of `stream` under `seed`.
pub fn stream(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

// Stream ids reserved for non-row purposes. Rows use their index directly.
pub(crate) const LABEL_STREAM: u64 = u64::MAX;
