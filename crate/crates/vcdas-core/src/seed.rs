//! Counter-based seed splitting for reproducible parallel experiments.
//!
//! A single master seed plus a path of integer tags (module, topology index,
//! batch, ...) deterministically selects an independent ChaCha stream, so a
//! computation gets the same random numbers no matter how work is scheduled
//! across threads or batches.

use rand_chacha::rand_core::SeedableRng;

pub use rand_chacha::ChaCha8Rng;

/// SplitMix64 step; used only for seed derivation, never for sampling.
#[inline]
fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9e37_79b9_7f4a_7c15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Derive the ChaCha stream identified by `(master, tags...)`.
///
/// Distinct tag paths yield statistically independent streams; the same path
/// always yields the same stream.
pub fn derive_rng(master: u64, tags: &[u64]) -> ChaCha8Rng {
    let mut state = master;
    let mut acc = splitmix64(&mut state);
    for &tag in tags {
        state ^= tag.wrapping_mul(0xff51_afd7_ed55_8ccd);
        acc ^= splitmix64(&mut state);
    }
    let mut seed = [0u8; 32];
    let mut s = acc;
    for chunk in seed.chunks_exact_mut(8) {
        chunk.copy_from_slice(&splitmix64(&mut s).to_le_bytes());
    }
    ChaCha8Rng::from_seed(seed)
}
