//! Reproducible random streams.
//!
//! Every replication of a Monte Carlo run owns one [`RngStream`]: the run seed
//! plus the replication index. ChaCha exposes 2^64 independent streams per
//! key, so results never depend on how replications are spread over workers.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

/// Generator used by all samplers.
pub type SimRng = ChaCha8Rng;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RngStream {
    pub seed: u64,
    pub stream_id: u64,
}

impl RngStream {
    pub fn new(seed: u64, stream_id: u64) -> Self {
        Self { seed, stream_id }
    }

    /// Fresh generator positioned at the start of this stream.
    pub fn rng(&self) -> SimRng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(self.stream_id);
        rng
    }

    /// Two non-overlapping generators on this stream: the second starts
    /// 2^66 words in, far beyond what one replication consumes.
    pub fn split(&self) -> (SimRng, SimRng) {
        let first = self.rng();
        let mut second = self.rng();
        second.set_word_pos(1u128 << 66);
        (first, second)
    }
}
