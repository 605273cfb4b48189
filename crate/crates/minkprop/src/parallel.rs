//! Deterministic data parallelism: results are always returned in input
//! order. The worker count honors the `MINKPROP_THREADS` environment
//! variable (default: all available cores).

use rayon::prelude::*;
use std::sync::OnceLock;

/// Name of the environment variable capping parallelism.
pub const THREADS_ENV: &str = "MINKPROP_THREADS";

fn pool() -> &'static rayon::ThreadPool {
    static POOL: OnceLock<rayon::ThreadPool> = OnceLock::new();
    POOL.get_or_init(|| {
        let threads = std::env::var(THREADS_ENV).ok().and_then(|v| v.trim().parse::<usize>().ok()).filter(|&n| n > 0);
        let mut builder = rayon::ThreadPoolBuilder::new();
        if let Some(n) = threads {
            builder = builder.num_threads(n);
        }
        builder.build().expect("thread pool construction")
    })
}

/// Number of worker threads in use.
pub fn threads() -> usize {
    pool().current_num_threads()
}

/// Maps `f` over `items` in parallel, preserving order.
pub fn map<T, R, F>(items: &[T], f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    if items.len() <= 1 {
        return items.iter().map(f).collect();
    }
    pool().install(|| items.par_iter().map(f).collect())
}
