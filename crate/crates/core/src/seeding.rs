//! Deterministic seed derivation.
//!
//! Every stochastic component draws from a ChaCha8 generator whose seed is
//! derived from a master seed through a fixed splitmix64 fold. The derivation
//! tree (master -> point -> instance -> shot) makes results independent of
//! execution order and thread count.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Domain tags keep the different derivation paths disjoint.
pub const TAG_INSTANCES: u64 = 0x494e_5354_0000_0001;
pub const TAG_POINT: u64 = 0x504f_494e_0000_0002;
pub const TAG_INSTANCE: u64 = 0x494e_4458_0000_0003;
pub const TAG_SHOT: u64 = 0x5348_4f54_0000_0004;

/// splitmix64 finalizer.
pub fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    let mut z = x;
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Folds a sequence of words into a single 64-bit seed.
pub fn mix(parts: &[u64]) -> u64 {
    let mut h = 0x6a09_e667_f3bc_c909u64;
    for &p in parts {
        h = splitmix64(h ^ splitmix64(p));
    }
    h
}

/// ChaCha8 generator seeded from the folded parts.
pub fn rng_from(parts: &[u64]) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(mix(parts))
}
