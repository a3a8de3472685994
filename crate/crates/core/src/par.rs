//! Data-parallel helpers with a sequential fallback.
//!
//! With the `parallel` feature the closures run on the rayon pool; without it
//! they run in order on the calling thread. Reductions are chunked with a
//! fixed chunk size so floating-point results do not depend on the thread
//! count.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Fixed reduction granularity; independent of the number of workers.
const REDUCE_CHUNK: usize = 1 << 14;

pub fn for_each_chunk<T, F>(data: &mut [T], chunk: usize, f: F)
where
    T: Send,
    F: Fn(usize, &mut [T]) + Sync + Send,
{
    #[cfg(feature = "parallel")]
    data.par_chunks_mut(chunk).enumerate().for_each(|(i, c)| f(i, c));
    #[cfg(not(feature = "parallel"))]
    data.chunks_mut(chunk).enumerate().for_each(|(i, c)| f(i, c));
}

/// Like [`for_each_chunk`] with per-worker scratch state.
pub fn for_each_chunk_init<T, S, I, F>(data: &mut [T], chunk: usize, init: I, f: F)
where
    T: Send,
    I: Fn() -> S + Sync + Send,
    F: Fn(&mut S, usize, &mut [T]) + Sync + Send,
{
    #[cfg(feature = "parallel")]
    data.par_chunks_mut(chunk)
        .enumerate()
        .for_each_init(&init, |s, (i, c)| f(s, i, c));
    #[cfg(not(feature = "parallel"))]
    {
        let mut s = init();
        data.chunks_mut(chunk).enumerate().for_each(|(i, c)| f(&mut s, i, c));
    }
}

/// Elementwise update of two equally long slices.
pub fn zip_mut<A, B, F>(a: &mut [A], b: &[B], f: F)
where
    A: Send,
    B: Sync,
    F: Fn(&mut A, &B) + Sync + Send,
{
    assert_eq!(a.len(), b.len());
    #[cfg(feature = "parallel")]
    a.par_iter_mut().zip(b.par_iter()).for_each(|(x, y)| f(x, y));
    #[cfg(not(feature = "parallel"))]
    a.iter_mut().zip(b.iter()).for_each(|(x, y)| f(x, y));
}

/// Deterministic sum of `f(i)` for `i in 0..len`.
pub fn sum_by<F>(len: usize, f: F) -> f64
where
    F: Fn(usize) -> f64 + Sync + Send,
{
    let chunks = len.div_ceil(REDUCE_CHUNK);
    let partial = |c: usize| {
        let lo = c * REDUCE_CHUNK;
        let hi = (lo + REDUCE_CHUNK).min(len);
        (lo..hi).map(&f).sum::<f64>()
    };
    #[cfg(feature = "parallel")]
    let parts: Vec<f64> = (0..chunks).into_par_iter().map(partial).collect();
    #[cfg(not(feature = "parallel"))]
    let parts: Vec<f64> = (0..chunks).map(partial).collect();
    parts.iter().sum()
}

/// Maximum of `f(i)` for `i in 0..len` (0 for empty ranges).
pub fn max_by<F>(len: usize, f: F) -> f64
where
    F: Fn(usize) -> f64 + Sync + Send,
{
    let chunks = len.div_ceil(REDUCE_CHUNK);
    let partial = |c: usize| {
        let lo = c * REDUCE_CHUNK;
        let hi = (lo + REDUCE_CHUNK).min(len);
        (lo..hi).map(&f).fold(0.0_f64, f64::max)
    };
    #[cfg(feature = "parallel")]
    return (0..chunks).into_par_iter().map(partial).reduce(|| 0.0, f64::max);
    #[cfg(not(feature = "parallel"))]
    return (0..chunks).map(partial).fold(0.0, f64::max);
}

/// Map over `0..len` collecting results in order.
pub fn map_collect<R, F>(len: usize, f: F) -> Vec<R>
where
    R: Send,
    F: Fn(usize) -> R + Sync + Send,
{
    #[cfg(feature = "parallel")]
    return (0..len).into_par_iter().map(f).collect();
    #[cfg(not(feature = "parallel"))]
    return (0..len).map(f).collect();
}

/// Map over a slice of inputs collecting results in order.
pub fn map_slice<T, R, F>(items: &[T], f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    #[cfg(feature = "parallel")]
    return items.par_iter().map(f).collect();
    #[cfg(not(feature = "parallel"))]
    return items.iter().map(f).collect();
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sum_is_chunk_deterministic() {
        let a = sum_by(100_003, |i| (i as f64).sqrt());
        let b = sum_by(100_003, |i| (i as f64).sqrt());
        assert_eq!(a.to_bits(), b.to_bits());
        assert_eq!(max_by(10, |i| i as f64), 9.0);
        assert_eq!(max_by(0, |i| i as f64), 0.0);
    }

    #[test]
    fn chunks_see_their_index() {
        let mut v = vec![0usize; 12];
        for_each_chunk(&mut v, 4, |i, c| c.iter_mut().for_each(|x| *x = i));
        assert_eq!(v, vec![0, 0, 0, 0, 1, 1, 1, 1, 2, 2, 2, 2]);
    }
}
