//! Seeded random streams.
//!
//! Every trial draws from its own ChaCha8 stream selected by the trial index,
//! so results do not depend on the order or the thread in which trials run.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Name and version of the generator scheme, written into reports.
pub const RNG_NAME: &str = "chacha8-stream-v1";

pub type TrialRng = ChaCha8Rng;

/// Generator for trial `trial` under `seed`.
pub fn trial_rng(seed: u64, trial: u64) -> TrialRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    rng
}
