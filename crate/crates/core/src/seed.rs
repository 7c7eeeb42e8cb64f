//! Seeding and stream splitting.
//!
//! All randomness comes from [`ChaCha8Rng`], which produces the same stream on
//! every platform. Independent substreams are keyed by a parent seed and a
//! label: `derive_seed(parent, label)` mixes the FNV-1a hash of the label's
//! UTF-8 bytes into the parent with two SplitMix64 finalizer rounds. Labels
//! are plain strings such as `"replicate/7"`, `"ics/var:mcd/mean"` or
//! `"trial/42"`, so a child seed depends only on what it is for and never on
//! the order in which children are requested.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type Rng = ChaCha8Rng;

const FNV_OFFSET: u64 = 0xcbf2_9ce4_8422_2325;
const FNV_PRIME: u64 = 0x0000_0100_0000_01b3;

fn fnv1a64(bytes: &[u8]) -> u64 {
    bytes
        .iter()
        .fold(FNV_OFFSET, |h, &b| (h ^ u64::from(b)).wrapping_mul(FNV_PRIME))
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Child seed for `label` under `parent`.
pub fn derive_seed(parent: u64, label: &str) -> u64 {
    splitmix64(splitmix64(parent) ^ fnv1a64(label.as_bytes()))
}

/// Child seed for an indexed substream (trial, replicate, angle index).
pub fn derive_indexed(parent: u64, label: &str, index: u64) -> u64 {
    splitmix64(derive_seed(parent, label) ^ splitmix64(index))
}

pub fn rng(seed: u64) -> Rng {
    ChaCha8Rng::seed_from_u64(seed)
}
