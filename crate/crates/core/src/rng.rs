//! Seeded random streams.
//!
//! Every stochastic task is keyed by `(seed, stream)`. The seed selects the
//! ChaCha key and the stream id selects an independent keystream, so work can
//! be split across threads without sharing generator state.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type TaskRng = ChaCha8Rng;

pub fn stream_rng(seed: u64, stream: u64) -> TaskRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Stream id for repetition `rep` of arm `arm` at size index `t`.
pub fn task_stream(t: u32, arm: u8, rep: u64) -> u64 {
    debug_assert!(rep < (1 << 40));
    (rep << 24) | ((t as u64 & 0xffff) << 8) | arm as u64
}
