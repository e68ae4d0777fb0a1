//! Counter-based random streams.
//!
//! Draw `i` of a resampling run is generated from its own ChaCha8 stream keyed
//! by the run seed and selected by `i`, so any subset of draws can be computed
//! in any order, on any thread, with the same result.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Generator for draw `index` under `seed`.
pub fn draw_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Keyed generator that hands out per-draw streams without re-deriving the key.
#[derive(Clone)]
pub struct DrawStreams {
    base: ChaCha8Rng,
}

impl DrawStreams {
    pub fn new(seed: u64) -> Self {
        Self { base: ChaCha8Rng::seed_from_u64(seed) }
    }

    pub fn stream(&self, index: u64) -> ChaCha8Rng {
        let mut rng = self.base.clone();
        rng.set_stream(index);
        rng
    }
}

const FNV_OFFSET: u64 = 0xcbf2_9ce4_8422_2325;
const FNV_PRIME: u64 = 0x0000_0100_0000_01b3;

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Stable 64-bit seed from a master seed and a list of key parts.
///
/// FNV-1a over the length-prefixed parts, finished with a SplitMix64 mix. The
/// result depends only on the inputs, never on platform or call order.
pub fn derive_seed(master: u64, parts: &[&[u8]]) -> u64 {
    let mut h = FNV_OFFSET;
    let mut feed = |bytes: &[u8]| {
        for &b in bytes {
            h ^= u64::from(b);
            h = h.wrapping_mul(FNV_PRIME);
        }
    };
    feed(&master.to_le_bytes());
    for part in parts {
        feed(&(part.len() as u64).to_le_bytes());
        feed(part);
    }
    splitmix64(h)
}
