//! Deterministic seed derivation for parallel work items.
//!
//! Seeds for per-topic or per-document RNG streams are derived from the user
//! seed plus stable item identifiers (never from iteration indices alone when
//! reordering must not matter). This keeps results bit-identical regardless
//! of worker count and, where ids are used, of input order.

/// FNV-1a over the bytes of `s`; stable across platforms and runs.
pub(crate) fn fnv1a64(s: &str) -> u64 {
    s.bytes()
        .fold(0xcbf2_9ce4_8422_2325u64, |h, b| (h ^ u64::from(b)).wrapping_mul(0x0000_0100_0000_01b3))
}

/// SplitMix64 finalizer; decorrelates nearby inputs.
fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Mixes a user seed with two stream identifiers into one RNG seed.
pub(crate) fn derive_seed(seed: u64, a: u64, b: u64) -> u64 {
    splitmix64(splitmix64(seed ^ splitmix64(a)) ^ splitmix64(b))
}
