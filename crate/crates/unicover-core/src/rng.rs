//! Seeding contract for all randomized experiments.
//!
//! Every trial gets its own ChaCha8 stream: the master seed fills the first
//! eight bytes of the 256-bit key and the trial id selects the stream
//! counter. Trials are therefore independent, reproducible, and reorderable
//! — parallel schedules produce byte-identical aggregates.

use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const DEFAULT_MASTER_SEED: u64 = 0x5EED_C0DE;

/// A generator for the given `(master_seed, trial_id)` pair.
pub fn trial_rng(master_seed: u64, trial_id: u64) -> ChaCha8Rng {
    let mut key = [0u8; 32];
    key[..8].copy_from_slice(&master_seed.to_le_bytes());
    let mut rng = ChaCha8Rng::from_seed(key);
    rng.set_stream(trial_id);
    rng
}

/// A uniform draw from `[0, 1)` with 53 random bits.
pub fn unit_uniform(rng: &mut ChaCha8Rng) -> f64 {
    (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}
