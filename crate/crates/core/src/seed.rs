//! Seed derivation.
//!
//! Every random stage takes its own 64-bit seed derived from a master seed, a
//! stage label and an index. The mixer is recorded in instance metadata as
//! [`MIXER_ID`]; changing it changes every generated instance.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub const MIXER_ID: &str = "splitmix64(splitmix64(master ^ fnv1a64(label)) ^ index * 0x9e3779b97f4a7c15)";

pub const LABEL_PARTITION: &str = "PARTITION";
pub const LABEL_BISECT: &str = "BISECT";
pub const LABEL_SUBQUBO: &str = "SUBQUBO";
pub const LABEL_PLANT: &str = "PLANT";
pub const LABEL_INSTANCE: &str = "INSTANCE";
pub const LABEL_SA_READ: &str = "SA_READ";

const GOLDEN: u64 = 0x9e37_79b9_7f4a_7c15;

pub fn splitmix64(x: u64) -> u64 {
    let mut z = x.wrapping_add(GOLDEN);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

pub fn fnv1a64(label: &str) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in label.bytes() {
        h ^= u64::from(b);
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    h
}

/// Derive the seed for `(label, index)` under `master`.
pub fn derive_seed(master: u64, label: &str, index: u64) -> u64 {
    splitmix64(splitmix64(master ^ fnv1a64(label)) ^ index.wrapping_mul(GOLDEN))
}

/// Seed for one bisection call at recursion `depth`, part `index` within that level.
pub fn bisection_seed(master: u64, depth: u32, index: u32) -> u64 {
    derive_seed(master, LABEL_BISECT, (u64::from(depth) << 32) | u64::from(index))
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}
