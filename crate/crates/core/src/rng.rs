//! Seeded random streams.
//!
//! Every draw in a run comes from a ChaCha8 stream keyed by the root seed, a
//! stream name (one per channel, neuron or the center) and a message key.
//! Keying per message means a draw never depends on how many other draws
//! happened before it, so adding a channel or changing a failure probability
//! leaves every other sample untouched.

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

const FNV_OFFSET: u64 = 0xcbf2_9ce4_8422_2325;
const FNV_PRIME: u64 = 0x0000_0100_0000_01b3;

fn fnv1a(mut hash: u64, bytes: &[u8]) -> u64 {
    for &b in bytes {
        hash ^= u64::from(b);
        hash = hash.wrapping_mul(FNV_PRIME);
    }
    hash
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Derives the 64-bit seed for `(root, stream, key)`.
pub fn derive_seed(root: u64, stream: &str, key: &str) -> u64 {
    let h = fnv1a(FNV_OFFSET, stream.as_bytes());
    let h = fnv1a(h ^ 0xff, key.as_bytes());
    splitmix64(splitmix64(root) ^ h)
}

/// One independent random stream.
#[derive(Clone, Debug)]
pub struct DrawStream(ChaCha8Rng);

impl DrawStream {
    pub fn new(root: u64, stream: &str, key: &str) -> Self {
        DrawStream(ChaCha8Rng::seed_from_u64(derive_seed(root, stream, key)))
    }

    pub fn from_seed(seed: u64) -> Self {
        DrawStream(ChaCha8Rng::seed_from_u64(seed))
    }

    /// Uniform draw in `[0, 1)` with 53 bits of precision.
    pub fn unit(&mut self) -> f64 {
        (self.0.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    pub fn next_u64(&mut self) -> u64 {
        self.0.next_u64()
    }
}
