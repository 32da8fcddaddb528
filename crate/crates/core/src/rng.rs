//! Per-replica random streams.
//!
//! Replica `i` under master seed `s` reads ChaCha8 keyed by `s` on stream
//! `i`. ChaCha is counter-based, so the stream is a pure function of
//! `(s, i)` and independent of scheduling.

use rand_chacha::rand_core::{RngCore, SeedableRng, TryRngCore};
use rand_chacha::ChaCha8Rng;

/// The random stream of one replica.
#[derive(Clone, Debug)]
pub struct ReplicaStream(ChaCha8Rng);

impl ReplicaStream {
    pub fn new(master_seed: u64, replica: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
        rng.set_stream(replica);
        Self(rng)
    }

    #[inline]
    pub fn next_u64(&mut self) -> u64 {
        self.0.next_u64()
    }

    /// Uniform on `[0, 1)` with 53 random bits.
    #[inline]
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }
}

/// Draws a seed from the operating system.
pub fn entropy_seed() -> u64 {
    rand_chacha::rand_core::OsRng
        .try_next_u64()
        .expect("operating system random source unavailable")
}
