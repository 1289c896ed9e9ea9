//! Seeded random streams.
//!
//! Realization `i` of a run with master seed `s` always draws from ChaCha8
//! stream `i` keyed by `s`, so ensembles give the same numbers however they
//! are scheduled across threads.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

pub type PrqRng = ChaCha8Rng;

pub fn master_rng(seed: u64) -> PrqRng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn realization_rng(seed: u64, index: u64) -> PrqRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Run `f` for every realization index in parallel; results come back in
/// index order.
pub fn map_realizations<T, F>(count: usize, seed: u64, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize, &mut PrqRng) -> T + Sync,
{
    (0..count)
        .into_par_iter()
        .map(|i| {
            let mut rng = realization_rng(seed, i as u64);
            f(i, &mut rng)
        })
        .collect()
}
