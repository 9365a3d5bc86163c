//! Keyed random streams.
//!
//! Every column of a sample batch gets its own ChaCha8 generator. The key is
//! derived from `(seed, stream)` and the ChaCha stream id is the column index,
//! so any column can be regenerated in isolation and parallel generation is
//! bit-identical to sequential generation.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// SplitMix64 finalizer.
fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

fn derive_key(seed: u64, stream: u64) -> [u8; 32] {
    let mut state = mix64(seed ^ 0x9e37_79b9_7f4a_7c15) ^ mix64(stream.wrapping_add(0x2545_f491_4f6c_dd1d));
    let mut key = [0u8; 32];
    for chunk in key.chunks_exact_mut(8) {
        state = state.wrapping_add(0x9e37_79b9_7f4a_7c15);
        chunk.copy_from_slice(&mix64(state).to_le_bytes());
    }
    key
}

/// Factory for per-column generators of one `(seed, stream)` pair.
#[derive(Clone, Copy, Debug)]
pub struct StreamKey {
    key: [u8; 32],
}

impl StreamKey {
    pub fn new(seed: u64, stream: u64) -> Self {
        Self { key: derive_key(seed, stream) }
    }

    /// Generator for column `index`.
    pub fn column(&self, index: u64) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::from_seed(self.key);
        rng.set_stream(index);
        rng
    }
}

/// Sub-streams used by composite experiments, so that distinct roles never
/// share random numbers even when the caller passes one seed.
pub mod streams {
    pub const MODEL_Y: u64 = 1;
    pub const MODEL_X: u64 = 2;
    pub const DIRECTIONS: u64 = 3;
    pub const METRIC: u64 = 4;
    pub const AUX: u64 = 5;
}
