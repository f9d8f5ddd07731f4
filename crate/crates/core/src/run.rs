//! Execution shim: data-parallel map/any primitives when the `parallel`
//! feature is enabled, plain loops otherwise. Both paths produce results in
//! the same (index) order so outputs are identical bit for bit.

/// Caps the worker pool at `n` threads (no-op in sequential builds and
/// after the pool has started).
pub fn configure_threads(n: usize) {
    #[cfg(feature = "parallel")]
    {
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    #[cfg(not(feature = "parallel"))]
    let _ = n;
}

/// Maps `f` over `0..n`, collecting results in index order.
pub fn map_indexed<T, F>(n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        (0..n).into_par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        (0..n).map(f).collect()
    }
}

/// Maps `f` over the chunks `[start, end)` of `0..total` split at `chunk`
/// boundaries, in ascending order of start index.
pub fn map_chunks<T, F>(total: u64, chunk: u64, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(u64, u64) -> T + Sync + Send,
{
    let n = total.div_ceil(chunk) as usize;
    map_indexed(n, |i| {
        let start = i as u64 * chunk;
        f(start, (start + chunk).min(total))
    })
}
