//! Small keyed integer mixers shared by the walk coins, the rolling-hash
//! parameter derivation, the sparse-recovery cell placement and the lab's
//! per-trial streams.

use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;

/// Murmur3 64-bit finalizer.
#[inline]
pub(crate) fn fmix64(mut h: u64) -> u64 {
    h ^= h >> 33;
    h = h.wrapping_mul(0xff51_afd7_ed55_8ccd);
    h ^= h >> 33;
    h = h.wrapping_mul(0xc4ce_b9fe_1a85_ec53);
    h ^= h >> 33;
    h
}

/// Fold a 128-bit seed and a domain label into one 64-bit key.
pub(crate) fn derive_key(seed: u128, domain: u64, index: u64) -> u64 {
    let lo = seed as u64;
    let hi = (seed >> 64) as u64;
    let mut h = fmix64(lo ^ 0x9e37_79b9_7f4a_7c15);
    h = fmix64(h ^ hi.rotate_left(17));
    h = fmix64(h ^ domain.wrapping_mul(0xd6e8_feb8_6659_fd93));
    fmix64(h ^ index.wrapping_mul(0xa076_1d64_78bd_642f))
}

/// A ChaCha stream dedicated to one (seed, domain, index) triple.
pub(crate) fn derived_rng(seed: u128, domain: u64, index: u64) -> ChaCha20Rng {
    let mut bytes = [0u8; 32];
    for (lane, chunk) in bytes.chunks_mut(8).enumerate() {
        let word = derive_key(seed, domain, index ^ ((lane as u64) << 56));
        chunk.copy_from_slice(&word.to_le_bytes());
    }
    ChaCha20Rng::from_seed(bytes)
}

/// Domain labels so that independent uses of one shared seed never alias.
pub(crate) mod domain {
    pub const WALK_COINS: u64 = 1;
    pub const ROLLING_HASH: u64 = 2;
    pub const RECOVERY: u64 = 3;
    pub const LAB: u64 = 4;
}
