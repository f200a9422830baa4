//! Seed derivation and RNG construction.
//!
//! All randomness flows through ChaCha8 streams created from explicit 64-bit
//! seeds. Parallel work (scan ranks, experiment repetitions) derives one
//! sub-seed per unit of work up front, so results never depend on thread
//! scheduling.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Fixed odd multiplier used to spread ranks across the seed space.
pub const RANK_SEED_MULTIPLIER: u64 = 0x9E37_79B9_7F4A_7C15;

/// Deterministic stream for one seed.
pub fn rng_from_seed(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Sub-seed for one threshold rank within a scan: XOR of the master seed with
/// the rank promoted to 64 bits and multiplied by a fixed odd constant.
pub fn rank_subseed(master_seed: u64, rank: usize) -> u64 {
    master_seed ^ (rank as u64).wrapping_mul(RANK_SEED_MULTIPLIER)
}

/// Counter-based split: an independent stream seed for the `index`-th unit of
/// work (repetition, mixture component) under one master seed. SplitMix64
/// finalizer over master + index, so neighboring indices decorrelate.
pub fn split_seed(master_seed: u64, index: u64) -> u64 {
    let mut z = master_seed.wrapping_add((index.wrapping_add(1)).wrapping_mul(RANK_SEED_MULTIPLIER));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}
