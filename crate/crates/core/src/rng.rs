//! Seeded random streams.
//!
//! Every stochastic routine draws from a ChaCha8 stream keyed by a 64-bit
//! seed. Independent sub-computations (Monte Carlo trials, rejection attempts,
//! halving rounds) use distinct stream ids under the same key, so results
//! depend only on `(seed, index)` and never on scheduling order.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type StreamRng = ChaCha8Rng;

/// Stream `index` under the key derived from `seed`.
pub fn substream(seed: u64, index: u64) -> StreamRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Two-level stream id, e.g. (round, attempt) inside one pipeline run.
pub fn substream2(seed: u64, outer: u64, inner: u64) -> StreamRng {
    substream(mix(seed, outer), inner)
}

/// splitmix64 finaliser over `seed ^ index`; used to derive child seeds.
pub fn mix(seed: u64, index: u64) -> u64 {
    let mut z = seed ^ index.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}
