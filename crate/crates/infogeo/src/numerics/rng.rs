//! Reproducible random streams.
//!
//! A `RandomStream` is a value: the same (seed, stream_id) pair always
//! produces the same ChaCha12 sequence, on every platform. Concurrent
//! consumers should take distinct stream ids rather than share one stream.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha12Rng;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RandomStream {
    pub seed: u64,
    pub stream_id: u64,
}

impl RandomStream {
    pub fn new(seed: u64, stream_id: u64) -> Self {
        RandomStream { seed, stream_id }
    }

    /// Sibling stream with a different id, same seed.
    pub fn with_stream(&self, stream_id: u64) -> Self {
        RandomStream { seed: self.seed, stream_id }
    }

    pub fn rng(&self) -> ChaCha12Rng {
        let mut rng = ChaCha12Rng::seed_from_u64(self.seed);
        rng.set_stream(self.stream_id);
        rng
    }
}
