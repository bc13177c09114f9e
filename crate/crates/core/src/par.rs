//! Thin switch between rayon and plain iterators.
//!
//! Every helper preserves input order in its output, so reductions performed by
//! callers on the collected values are bitwise identical in both builds.

/// Problems with at least this many `n·m` coordinates evaluate their terms in parallel.
pub(crate) const TERM_PAR_THRESHOLD: usize = 1 << 17;

#[cfg(feature = "parallel")]
pub(crate) fn map_collect<T, R, F>(items: &[T], f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    use rayon::prelude::*;
    items.par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
pub(crate) fn map_collect<T, R, F>(items: &[T], f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    items.iter().map(f).collect()
}

/// Maps `f` over `items`, in parallel only when `parallel` is set and the
/// feature is enabled.
pub(crate) fn map_collect_if<T, R, F>(parallel: bool, items: &[T], f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    if parallel {
        map_collect(items, f)
    } else {
        items.iter().map(f).collect()
    }
}

/// Fills `out` chunk by chunk; `f` receives the chunk's starting index.
#[cfg(feature = "parallel")]
pub(crate) fn fill_chunks<F>(parallel: bool, out: &mut [f64], f: F)
where
    F: Fn(usize, &mut [f64]) + Sync + Send,
{
    const CHUNK: usize = 4096;
    if parallel {
        use rayon::prelude::*;
        out.par_chunks_mut(CHUNK).enumerate().for_each(|(i, c)| f(i * CHUNK, c));
    } else {
        f(0, out);
    }
}

#[cfg(not(feature = "parallel"))]
pub(crate) fn fill_chunks<F>(_parallel: bool, out: &mut [f64], f: F)
where
    F: Fn(usize, &mut [f64]) + Sync + Send,
{
    f(0, out);
}
