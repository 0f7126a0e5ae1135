//! Seeded random streams.
//!
//! Every consumer of randomness takes an explicit `u64` seed. Independent
//! streams under one seed (EM restarts, per-trial draws) are ChaCha stream
//! ids, so they never overlap and do not depend on execution order.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type SeededRng = ChaCha8Rng;

pub fn seeded(seed: u64) -> SeededRng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn seeded_stream(seed: u64, stream: u64) -> SeededRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}
