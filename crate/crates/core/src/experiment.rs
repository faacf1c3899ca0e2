//! Replication farming with scheduling-independent seeds.

use rayon::prelude::*;

use crate::coeffs::derive_seed;
use crate::error::Result;

/// Run `f(rep, derive_seed(seed, rep))` for `rep in 0..reps` on the current
/// rayon pool. Results come back in replication order and the first error
/// by replication index wins.
pub fn replicate<T, F>(reps: usize, seed: u64, f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(u64, u64) -> Result<T> + Sync,
{
    (0..reps as u64)
        .into_par_iter()
        .map(|r| f(r, derive_seed(seed, r)))
        .collect::<Vec<_>>()
        .into_iter()
        .collect()
}

/// Thread pool with `threads` workers, or rayon's default when `None`.
pub fn thread_pool(threads: Option<usize>) -> Result<rayon::ThreadPool> {
    let mut b = rayon::ThreadPoolBuilder::new();
    if let Some(t) = threads {
        b = b.num_threads(t);
    }
    b.build()
        .map_err(|e| crate::Error::InvalidArgument(format!("cannot build thread pool: {e}")))
}
