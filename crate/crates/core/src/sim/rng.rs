//! Deterministic per-vertex randomness.
//!
//! Every vertex gets its own stream of a counter-based generator, derived
//! from `(run seed, vertex id)`. Identical inputs reproduce identical
//! streams; distinct vertices get statistically independent streams of the
//! same family, which realizes algorithms whose vertices toss independent
//! coins.

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::graph::VertexId;

/// Deterministic pseudorandom stream for one vertex (or one centralized
/// computation).
#[derive(Clone, Debug)]
pub struct RngStream(ChaCha8Rng);

impl RngStream {
    /// Stream for vertex `v` under the given run seed.
    pub fn for_vertex(seed: u64, v: VertexId) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(u64::from(v) + 1);
        RngStream(rng)
    }

    /// Stream 0, used by centralized helpers (generators, oracles).
    pub fn for_run(seed: u64) -> Self {
        RngStream(ChaCha8Rng::seed_from_u64(seed))
    }
}

impl RngCore for RngStream {
    fn next_u32(&mut self) -> u32 {
        self.0.next_u32()
    }

    fn next_u64(&mut self) -> u64 {
        self.0.next_u64()
    }

    fn fill_bytes(&mut self, dest: &mut [u8]) {
        self.0.fill_bytes(dest)
    }
}
