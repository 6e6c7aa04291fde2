//! Deterministic batch execution: map pure functions over indexed inputs,
//! optionally on a rayon pool, always gathering results by input index so
//! output order is independent of scheduling.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

#[cfg(feature = "parallel")]
use crate::Error;
use crate::Result;

/// Evaluate `f` over every item, returning results in input order. With the
/// `parallel` feature this fans out over the current rayon pool; without it
/// the loop is sequential. Either way the output is schedule-independent.
pub fn map_indexed<T, R, F>(items: &[T], f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync,
{
    #[cfg(feature = "parallel")]
    {
        items.par_iter().map(&f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        items.iter().map(&f).collect()
    }
}

/// Always-sequential reference path, kept for byte-identity comparisons
/// against [`map_indexed`].
pub fn map_indexed_seq<T, R, F>(items: &[T], f: F) -> Vec<R>
where
    F: Fn(&T) -> R,
{
    items.iter().map(f).collect()
}

/// Run `op` on a dedicated pool with the given worker count (0 = one worker
/// per available core). Without the `parallel` feature the count is ignored
/// and `op` runs on the calling thread.
pub fn with_workers<R, F>(workers: usize, op: F) -> Result<R>
where
    R: Send,
    F: FnOnce() -> R + Send,
{
    #[cfg(feature = "parallel")]
    {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(workers)
            .build()
            .map_err(|e| Error::Validation {
                field: "workers",
                message: e.to_string(),
            })?;
        Ok(pool.install(op))
    }
    #[cfg(not(feature = "parallel"))]
    {
        let _ = workers;
        Ok(op())
    }
}
