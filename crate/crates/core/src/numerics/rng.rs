//! Reproducible randomness. Every sampler takes an [`RngStream`]; identical
//! (seed, stream_id) pairs reproduce identical draw sequences, and distinct
//! stream ids yield independent streams, which is what makes Monte-Carlo
//! estimates invariant under any partitioning of trials across workers.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha12Rng;

/// A (seed, stream) pair naming one deterministic random sequence.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct RngStream {
    pub seed: u64,
    pub stream_id: u64,
}

impl RngStream {
    pub fn new(seed: u64, stream_id: u64) -> Self {
        RngStream { seed, stream_id }
    }

    /// Derived stream with the same seed, e.g. one per Monte-Carlo trial.
    pub fn substream(&self, offset: u64) -> Self {
        RngStream {
            seed: self.seed,
            stream_id: self.stream_id.wrapping_add(offset),
        }
    }

    /// Instantiate the generator for this stream.
    pub fn rng(&self) -> ChaCha12Rng {
        let mut rng = ChaCha12Rng::seed_from_u64(self.seed);
        rng.set_stream(self.stream_id);
        rng
    }
}
