//! Deterministic random streams.
//!
//! Trial `k` of a run seeded with `s` draws from `ChaCha8(s + k)` on stream 0.
//! Node populations use stream 1 of the same seed family, so they never
//! overlap a trial's shadowing draws. Results therefore depend only on the
//! seed, never on which worker executed a trial.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type SimRng = ChaCha8Rng;

const TRIAL_STREAM: u64 = 0;
const POPULATION_STREAM: u64 = 1;

/// Shadowing stream for one Monte-Carlo trial.
pub fn trial_rng(seed: u64, trial: u64) -> SimRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(trial));
    rng.set_stream(TRIAL_STREAM);
    rng
}

/// Stream used to place the ground-node population.
pub fn population_rng(seed: u64, trial: u64) -> SimRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(trial));
    rng.set_stream(POPULATION_STREAM);
    rng
}
