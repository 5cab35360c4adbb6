//! Named, versioned, splittable random streams.
//!
//! Every Monte Carlo replicate and every optimizer start derives its own
//! stream from `(master seed, index)`, so results do not depend on how work
//! is scheduled across threads.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Identifier recorded in output files so a trace can be replayed.
pub const RNG_NAME: &str = "chacha8-stream-v1";

pub type StreamRng = ChaCha8Rng;

/// The stream for replicate `index` under `master`.
pub fn stream(master: u64, index: u64) -> StreamRng {
    let mut rng = ChaCha8Rng::seed_from_u64(master);
    rng.set_stream(index);
    rng
}

/// Stream index reserved for strategy-local randomness of a replicate; kept
/// apart from the process stream so the player never sees nature's draws.
pub fn strategy_stream(master: u64, index: u64) -> StreamRng {
    stream(master ^ 0x9e37_79b9_7f4a_7c15, index)
}
