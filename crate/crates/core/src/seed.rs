//! Counter-based seed splitting so every pipeline stage can be re-run alone.

/// Pipeline stages that draw randomness.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u64)]
pub enum Stage {
    Tree = 1,
    Reservoir = 2,
    Packing = 3,
    Audit = 4,
    Trial = 5,
}

#[inline]
pub fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Seed for `stage` on attempt `counter`, derived from the global seed.
pub fn derive(seed: u64, stage: Stage, counter: u64) -> u64 {
    splitmix64(splitmix64(seed ^ splitmix64(stage as u64)) ^ counter)
}
