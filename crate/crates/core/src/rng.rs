//! Reproducible random streams.
//!
//! A [`RandomStream`] is a `(seed, id)` pair. Its generator is ChaCha8 keyed
//! by the seed with the stream id selecting the ChaCha stream, so the k-th
//! draw of a stream is a pure function of `(seed, id, k)`. Work units take
//! child streams derived from their index, which keeps parallel runs
//! bit-identical regardless of scheduling.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct RandomStream {
    seed: u64,
    id: u64,
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

impl RandomStream {
    pub fn new(seed: u64) -> Self {
        Self { seed, id: 0 }
    }

    pub fn with_id(seed: u64, id: u64) -> Self {
        Self { seed, id }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn id(&self) -> u64 {
        self.id
    }

    /// Independent substream for work unit `index`.
    pub fn child(&self, index: u64) -> Self {
        let id = splitmix64(self.id ^ splitmix64(index.wrapping_add(0x5851_f42d_4c95_7f2d)));
        Self { seed: self.seed, id }
    }

    pub fn rng(&self) -> ChaCha8Rng {
        let mut key = [0u8; 32];
        let mut state = self.seed;
        for chunk in key.chunks_mut(8) {
            state = splitmix64(state);
            chunk.copy_from_slice(&state.to_le_bytes());
        }
        let mut rng = ChaCha8Rng::from_seed(key);
        rng.set_stream(self.id);
        rng
    }
}
