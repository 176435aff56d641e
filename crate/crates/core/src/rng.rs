//! Deterministic substream derivation.
//!
//! Every randomized operation keys its Gaussian (or gamma, or uniform) draws
//! by a triple `(seed, domain, index)`: the caller's master seed, a constant
//! tag identifying the operation family, and a trial index. Trials therefore
//! use statistically independent streams that can be evaluated concurrently,
//! in any order, and still reproduce bitwise.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Domain tags. Distinct tags keep, e.g., matrix generation and estimator
/// draws decorrelated even when a caller reuses one master seed for both.
pub mod domain {
    pub const MATRIX_GEN: u64 = 0x01;
    pub const ESTIMATOR: u64 = 0x02;
    pub const CHI2_PRODUCT: u64 = 0x03;
    pub const WISHART: u64 = 0x04;
    pub const YN_ESTIMATE: u64 = 0x05;
}

/// SplitMix64 finalizer; full avalanche over one 64-bit word.
fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Derive the ChaCha8 stream for `(seed, domain, index)`.
pub fn substream(seed: u64, domain: u64, index: u64) -> ChaCha8Rng {
    const GOLDEN: u64 = 0x9e37_79b9_7f4a_7c15;
    let mut state = mix64(seed ^ GOLDEN);
    state = mix64(state ^ domain);
    state = mix64(state ^ index);
    let mut key = [0u8; 32];
    for chunk in key.chunks_exact_mut(8) {
        state = state.wrapping_add(GOLDEN);
        chunk.copy_from_slice(&mix64(state).to_le_bytes());
    }
    ChaCha8Rng::from_seed(key)
}
