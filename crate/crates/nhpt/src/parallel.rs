//! Order-preserving parallel map capped by `NHPT_THREADS`.

use anyhow::{bail, Context, Result};
use rayon::prelude::*;

pub const THREADS_VAR: &str = "NHPT_THREADS";

/// Worker count: `NHPT_THREADS` when set, otherwise the available cores.
pub fn thread_count() -> Result<usize> {
    match std::env::var(THREADS_VAR) {
        Ok(v) => {
            let n: usize = v.trim().parse().with_context(|| format!("{THREADS_VAR}={v:?} is not a count"))?;
            if n == 0 {
                bail!("{THREADS_VAR} must be at least 1");
            }
            Ok(n)
        }
        Err(_) => Ok(std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1)),
    }
}

/// Results come back in input order regardless of scheduling.
pub fn map<T, R, F>(items: &[T], f: F) -> Result<Vec<R>>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> Result<R> + Sync + Send,
{
    let threads = thread_count()?.min(items.len().max(1));
    if threads == 1 {
        return items.iter().map(f).collect();
    }
    let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build()?;
    pool.install(|| items.par_iter().map(f).collect())
}
