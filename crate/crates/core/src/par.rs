//! Data-parallel primitives with a sequential fallback.
//!
//! Every helper here is bit-deterministic regardless of thread count:
//! per-element work is independent, and reductions either compare with a
//! total order or sum an ordered buffer sequentially.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Maps `f` over `0..n` into a vector.
#[cfg(feature = "parallel")]
pub fn map_indexed<T, F>(n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    (0..n).into_par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
pub fn map_indexed<T, F>(n: usize, f: F) -> Vec<T>
where
    F: Fn(usize) -> T,
{
    (0..n).map(f).collect()
}

/// Applies `f(i, &mut slice[i])` to every element in place.
#[cfg(feature = "parallel")]
pub fn for_each_mut<T, F>(slice: &mut [T], f: F)
where
    T: Send,
    F: Fn(usize, &mut T) + Sync + Send,
{
    slice.par_iter_mut().enumerate().for_each(|(i, x)| f(i, x));
}

#[cfg(not(feature = "parallel"))]
pub fn for_each_mut<T, F>(slice: &mut [T], f: F)
where
    F: Fn(usize, &mut T),
{
    for (i, x) in slice.iter_mut().enumerate() {
        f(i, x);
    }
}

/// Index of the smallest `f(i)` over `0..n`, ties broken by smallest index.
///
/// The (value, index) pair has a total order, so the parallel reduction is
/// independent of chunking. Non-finite scores lose against finite ones.
pub fn argmin_by<F>(n: usize, f: F) -> usize
where
    F: Fn(usize) -> f64 + Sync + Send,
{
    assert!(n > 0, "argmin over empty range");
    let better = |a: (f64, usize), b: (f64, usize)| -> (f64, usize) {
        // NaN sorts last; equal scores pick the smaller index.
        if b.0 < a.0 || (b.0 == a.0 && b.1 < a.1) || a.0.is_nan() {
            b
        } else {
            a
        }
    };
    #[cfg(feature = "parallel")]
    {
        (0..n)
            .into_par_iter()
            .map(|i| (f(i), i))
            .reduce(|| (f64::INFINITY, usize::MAX), better)
            .1
    }
    #[cfg(not(feature = "parallel"))]
    {
        (0..n)
            .map(|i| (f(i), i))
            .fold((f64::INFINITY, usize::MAX), |a, b| better(a, b))
            .1
    }
}

/// Sums `f(i)` over `0..n` deterministically: per-index terms are computed
/// in parallel, the final accumulation is sequential in index order.
pub fn sum_indexed<F>(n: usize, f: F) -> f64
where
    F: Fn(usize) -> f64 + Sync + Send,
{
    map_indexed(n, f).iter().sum()
}
