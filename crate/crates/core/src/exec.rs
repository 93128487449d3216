//! Chunked map-reduce used by the Monte Carlo drivers.
//!
//! With the `parallel` feature (default) [`Execution::Parallel`] runs chunks on
//! the rayon pool; without it, every mode runs sequentially. Chunk boundaries
//! depend only on the workload size, and reductions are order-preserving, so
//! results never depend on the thread count.

use std::ops::Range;

#[cfg(feature = "parallel")]
use rayon::prelude::*;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Execution {
    Sequential,
    Parallel,
}

impl Default for Execution {
    fn default() -> Self {
        if cfg!(feature = "parallel") {
            Execution::Parallel
        } else {
            Execution::Sequential
        }
    }
}

/// Default number of work items per chunk.
pub const CHUNK: u64 = 4096;

/// Splits `0..total` into fixed chunks of `chunk` items, maps each chunk and
/// reduces the results left to right.
pub fn map_reduce_chunks<R, M, F>(exec: Execution, total: u64, chunk: u64, identity: R, map: M, reduce: F) -> R
where
    R: Send + Sync + Clone,
    M: Fn(Range<u64>) -> R + Send + Sync,
    F: Fn(R, R) -> R + Send + Sync,
{
    assert!(chunk > 0);
    let n_chunks = total.div_ceil(chunk);
    let bounds = move |c: u64| c * chunk..((c + 1) * chunk).min(total);
    match exec {
        #[cfg(feature = "parallel")]
        Execution::Parallel => {
            (0..n_chunks).into_par_iter().map(|c| map(bounds(c))).reduce(|| identity.clone(), &reduce)
        }
        _ => (0..n_chunks).map(|c| map(bounds(c))).fold(identity, reduce),
    }
}
