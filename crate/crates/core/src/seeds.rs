//! Deterministic seed derivation for independent RNG streams.

/// splitmix64 finalizer.
fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Derives an independent stream seed from a base seed and one index.
pub fn mix2(base: u64, a: u64) -> u64 {
    splitmix(splitmix(base) ^ a.wrapping_mul(0xa076_1d64_78bd_642f))
}

/// Derives an independent stream seed from a base seed and two indices.
pub fn mix3(base: u64, a: u64, b: u64) -> u64 {
    mix2(mix2(base, a), b)
}
