//! Deterministic chunked map-reduce.
//!
//! Work is split into fixed-size chunks whose boundaries do not depend on the
//! thread count. Chunk results are collected in chunk order and merged with a
//! fixed pairwise tree, so floating-point results are bit-identical whether the
//! `parallel` feature is on or off and for any pool size.

use std::ops::Range;

/// Chunk length used by statistics that do not pick their own.
pub const DEFAULT_CHUNK: u64 = 1 << 12;

fn chunks(range: Range<u64>, chunk: u64) -> Vec<Range<u64>> {
    let chunk = chunk.max(1);
    let mut out = Vec::new();
    let mut a = range.start;
    while a < range.end {
        let b = (a + chunk).min(range.end);
        out.push(a..b);
        a = b;
    }
    out
}

/// Maps every item in order; results keep input order.
pub fn map_ordered<T, R, F>(items: &[T], f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        items.par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        items.iter().map(f).collect()
    }
}

/// Pairwise merge with a shape that depends only on `parts.len()`.
pub fn tree_reduce<T>(mut parts: Vec<T>, identity: impl Fn() -> T, merge: impl Fn(T, T) -> T) -> T {
    if parts.is_empty() {
        return identity();
    }
    while parts.len() > 1 {
        let mut next = Vec::with_capacity(parts.len().div_ceil(2));
        let mut it = parts.into_iter();
        while let Some(a) = it.next() {
            match it.next() {
                Some(b) => next.push(merge(a, b)),
                None => next.push(a),
            }
        }
        parts = next;
    }
    parts.pop().unwrap()
}

/// Maps each chunk of `range` and merges the chunk results deterministically.
pub fn chunked_reduce<T, M, R>(range: Range<u64>, chunk: u64, map: M, identity: impl Fn() -> T, merge: R) -> T
where
    T: Send,
    M: Fn(Range<u64>) -> T + Sync + Send,
    R: Fn(T, T) -> T,
{
    let parts = map_ordered(&chunks(range, chunk), |r| map(r.clone()));
    tree_reduce(parts, identity, merge)
}

/// Ordered per-chunk outputs, concatenated.
pub fn chunked_collect<T, M>(range: Range<u64>, chunk: u64, map: M) -> Vec<T>
where
    T: Send,
    M: Fn(Range<u64>) -> Vec<T> + Sync + Send,
{
    map_ordered(&chunks(range, chunk), |r| map(r.clone())).into_iter().flatten().collect()
}

/// Runs `f` inside a pool of `threads` workers (ignored without `parallel`).
pub fn with_threads<R: Send>(threads: usize, f: impl FnOnce() -> R + Send) -> R {
    #[cfg(feature = "parallel")]
    {
        match rayon::ThreadPoolBuilder::new().num_threads(threads.max(1)).build() {
            Ok(pool) => pool.install(f),
            Err(_) => f(),
        }
    }
    #[cfg(not(feature = "parallel"))]
    {
        let _ = threads;
        f()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tree_shape_is_fixed() {
        let xs: Vec<f64> = (0..1000).map(|i| 1.0 / (i as f64 + 1.0)).collect();
        let a = tree_reduce(xs.clone(), || 0.0, |a, b| a + b);
        let b = tree_reduce(xs, || 0.0, |a, b| a + b);
        assert_eq!(a.to_bits(), b.to_bits());
    }

    #[test]
    fn chunk_results_independent_of_pool() {
        let run = || chunked_reduce(0..100_000, 777, |r| r.map(|i| (i as f64).sqrt()).sum::<f64>(), || 0.0, |a, b| a + b);
        let one = with_threads(1, run);
        let four = with_threads(4, run);
        assert_eq!(one.to_bits(), four.to_bits());
        assert_eq!(chunked_collect(0..10, 3, |r| r.collect()), (0..10).collect::<Vec<u64>>());
        assert_eq!(tree_reduce(Vec::<u32>::new(), || 7, |a, b| a + b), 7);
    }
}
