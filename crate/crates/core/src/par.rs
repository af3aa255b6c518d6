//! Data-parallel helpers that fall back to plain iteration when the
//! `parallel` feature is disabled.
//!
//! Every helper preserves input order in its output, so callers get the
//! same result whichever backend is compiled in.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Maps `f` over a slice and collects the results in input order.
pub fn map_slice<T, R, F>(items: &[T], f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        items.par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        items.iter().map(f).collect()
    }
}

/// Maps `f` over `start..end` and collects the results in index order.
pub fn map_range<R, F>(start: u64, end: u64, f: F) -> Vec<R>
where
    R: Send,
    F: Fn(u64) -> R + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        (start..end).into_par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        (start..end).map(f).collect()
    }
}

/// Number of worker threads the active backend will use.
pub fn worker_count() -> usize {
    #[cfg(feature = "parallel")]
    {
        rayon::current_num_threads()
    }
    #[cfg(not(feature = "parallel"))]
    {
        1
    }
}

/// Name of the compiled-in backend, recorded in run manifests.
pub fn backend() -> &'static str {
    if cfg!(feature = "parallel") {
        "rayon"
    } else {
        "sequential"
    }
}
