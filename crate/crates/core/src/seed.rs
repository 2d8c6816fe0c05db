//! Counter-based seed splitting for reproducible parallel sweeps.
//!
//! A run's seed depends only on `(master_seed, point, run)`, never on which
//! worker executes it or in what order. For a fixed master seed the mapping is
//! injective over `point, run < 2^32`: the pair is packed into one word and
//! passed through bijective mixing steps.

/// SplitMix64 finaliser; a bijection on `u64`.
pub const fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

const GOLDEN_GAMMA: u64 = 0x9e37_79b9_7f4a_7c15;

/// Seed for run `run` of grid point `point`.
pub fn derive_seed(master_seed: u64, point: u32, run: u32) -> u64 {
    let counter = (u64::from(point) << 32) | u64::from(run);
    let key = mix64(master_seed.wrapping_add(GOLDEN_GAMMA));
    mix64(mix64(counter) ^ key)
}
