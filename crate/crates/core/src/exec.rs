//! Deterministic block-parallel sample loops.
//!
//! Samples are split into fixed-size blocks; block `b` draws from ChaCha8
//! stream `b` of the run seed. The sample set therefore depends only on
//! `(seed, samples)`, never on the worker count, and per-block partial results
//! are reduced in block order.

use std::ops::Range;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub const BLOCK_SIZE: u64 = 4096;

/// Environment variable overriding the worker count of every run.
pub const WORKERS_ENV: &str = "PARSET_WORKERS";

/// Generator for one block of samples.
pub fn block_rng(seed: u64, block: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(block);
    rng
}

/// Mixes a base seed with a tag so that logically distinct streams (trials,
/// estimators) do not share samples.
pub fn derive_seed(seed: u64, tag: u64) -> u64 {
    // splitmix64 finalizer
    let mut z = seed ^ tag.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub fn effective_workers(requested: usize) -> usize {
    std::env::var(WORKERS_ENV)
        .ok()
        .and_then(|v| v.trim().parse::<usize>().ok())
        .filter(|&w| w > 0)
        .unwrap_or(requested.max(1))
}

/// Runs `f(block_index, sample_range, rng)` over every block of `samples` and
/// returns the block results in block order.
pub fn map_blocks<T, F>(samples: u64, seed: u64, workers: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(u64, Range<u64>, &mut ChaCha8Rng) -> T + Sync + Send,
{
    let blocks = samples.div_ceil(BLOCK_SIZE);
    let run = |b: u64| {
        let start = b * BLOCK_SIZE;
        let end = (start + BLOCK_SIZE).min(samples);
        let mut rng = block_rng(seed, b);
        f(b, start..end, &mut rng)
    };
    map_indices(blocks as usize, workers, |b| run(b as u64))
}

/// Order-preserving map over `0..n`, parallel when the `parallel` feature is
/// enabled and more than one worker is requested.
pub fn map_indices<T, F>(n: usize, workers: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    let workers = effective_workers(workers);
    #[cfg(feature = "parallel")]
    if workers > 1 && n > 1 {
        use rayon::prelude::*;
        return pool(workers).install(|| (0..n).into_par_iter().map(&f).collect());
    }
    let _ = workers;
    (0..n).map(f).collect()
}

#[cfg(feature = "parallel")]
fn pool(workers: usize) -> std::sync::Arc<rayon::ThreadPool> {
    use std::collections::HashMap;
    use std::sync::{Arc, Mutex, OnceLock};

    static POOLS: OnceLock<Mutex<HashMap<usize, Arc<rayon::ThreadPool>>>> = OnceLock::new();
    let mut pools = POOLS
        .get_or_init(Default::default)
        .lock()
        .unwrap_or_else(|e| e.into_inner());
    pools
        .entry(workers)
        .or_insert_with(|| {
            Arc::new(
                rayon::ThreadPoolBuilder::new()
                    .num_threads(workers)
                    .build()
                    .expect("failed to build rayon thread pool"),
            )
        })
        .clone()
}

pub fn default_workers() -> usize {
    std::thread::available_parallelism().map_or(1, |n| n.get())
}
