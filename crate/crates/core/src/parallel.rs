//! Deterministic parallelism helpers.
//!
//! All parallel work in this crate is element-wise over disjoint index
//! ranges (grid evaluations); reductions happen afterwards in a fixed
//! sequential order, so the output is bit-identical for any thread count.
//! The pool size is capped by the `GTM_THREADS` environment variable
//! (`0` or unset means automatic).

use once_cell::sync::Lazy;
use rayon::ThreadPool;

static POOL: Lazy<ThreadPool> = Lazy::new(|| {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = configured_threads() {
        builder = builder.num_threads(n);
    }
    builder
        .build()
        .expect("failed to build the worker thread pool")
});

fn configured_threads() -> Option<usize> {
    let raw = std::env::var("GTM_THREADS").ok()?;
    match raw.trim().parse::<usize>() {
        Ok(0) | Err(_) => None,
        Ok(n) => Some(n),
    }
}

/// Runs `f` inside the crate's worker pool.
pub fn install<R: Send>(f: impl FnOnce() -> R + Send) -> R {
    POOL.install(f)
}
