//! Worker pools. Library code parallelizes with rayon and merges results in a
//! fixed order, so the worker count never changes any output.

use rayon::ThreadPoolBuilder;

use crate::error::{Error, Result};

/// Runs `f` inside a dedicated pool of `workers` threads.
pub fn with_workers<R: Send>(workers: usize, f: impl FnOnce() -> R + Send) -> Result<R> {
    if workers == 0 {
        return Err(Error::invalid("worker count must be positive"));
    }
    let pool = ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| Error::invalid(format!("cannot start worker pool: {e}")))?;
    Ok(pool.install(f))
}
