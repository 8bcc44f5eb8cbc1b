//! Data-parallel helpers with a sequential fallback.
//!
//! With the `parallel` feature (default) the row kernels and suite sweeps run
//! on rayon's global pool. [`Execution::Sequential`] pins a closure to a
//! single-thread pool so the same code paths can be timed against each other.

use serde::{Deserialize, Serialize};

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Rows below this count are processed serially even in parallel mode.
pub const PARALLEL_ROW_THRESHOLD: usize = 64;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Execution {
    Sequential,
    #[default]
    Parallel,
}

/// Runs `f` under the requested execution mode.
pub fn install<R: Send>(mode: Execution, f: impl FnOnce() -> R + Send) -> R {
    #[cfg(feature = "parallel")]
    if mode == Execution::Sequential {
        return single_thread_pool().install(f);
    }
    let _ = mode;
    f()
}

#[cfg(feature = "parallel")]
fn single_thread_pool() -> &'static rayon::ThreadPool {
    use std::sync::OnceLock;
    static POOL: OnceLock<rayon::ThreadPool> = OnceLock::new();
    POOL.get_or_init(|| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(1)
            .build()
            .expect("single-thread pool")
    })
}

/// Calls `f(row_index, row)` for every `row_len`-sized chunk of `data`.
pub fn for_each_row<T, F>(data: &mut [T], row_len: usize, f: F)
where
    T: Send,
    F: Fn(usize, &mut [T]) + Sync + Send,
{
    if row_len == 0 {
        return;
    }
    #[cfg(feature = "parallel")]
    if data.len() / row_len >= PARALLEL_ROW_THRESHOLD {
        data.par_chunks_mut(row_len).enumerate().for_each(|(r, row)| f(r, row));
        return;
    }
    data.chunks_mut(row_len).enumerate().for_each(|(r, row)| f(r, row));
}

/// `(0..n).map(f).collect()`, in parallel when available. Output order is
/// always index order.
pub fn map_indexed<R, F>(n: usize, f: F) -> Vec<R>
where
    R: Send,
    F: Fn(usize) -> R + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        (0..n).into_par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        (0..n).map(f).collect()
    }
}
