//! Deterministic random streams.
//!
//! A stream is a ChaCha8 generator keyed by a 64-bit seed and positioned on
//! a 64-bit stream id. The stream id packs a domain tag (what the draws are
//! for) with a replicate index, so replicate `b` of a bootstrap batch sees the
//! same numbers no matter which worker evaluates it or in what order.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type Stream = ChaCha8Rng;

/// What a stream is used for. Different domains never share draws.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u64)]
pub enum Domain {
    BootstrapBatch = 1,
    NullSamples = 2,
    Data = 3,
    Loadings = 4,
    Verification = 5,
}

const INDEX_BITS: u32 = 48;

/// Returns the stream for replicate `index` within `domain`.
pub fn stream(seed: u64, domain: Domain, index: u64) -> Stream {
    debug_assert!(index < (1u64 << INDEX_BITS));
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(((domain as u64) << INDEX_BITS) | index);
    rng
}

/// Derives an independent child seed, e.g. one per Monte Carlo replication.
pub fn child_seed(seed: u64, a: u64, b: u64) -> u64 {
    splitmix64(splitmix64(splitmix64(seed) ^ a) ^ b.wrapping_mul(0x9E37_79B9_7F4A_7C15))
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}
