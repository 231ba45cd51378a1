//! Execution helpers for the data-parallel scans.
//!
//! Pair scans and Monte Carlo sweeps parallelize over disjoint index ranges.
//! The `parallel` feature (on by default) routes them through rayon; without
//! it the same entry points fall back to the sequential loops. The `_seq`
//! variants are always compiled so benchmarks can compare both paths.

/// Maximum of `eval(i)` over `0..n`, sequential loop.
pub fn sup_indexed_seq(n: usize, eval: impl Fn(usize) -> f64) -> f64 {
    (0..n).map(eval).fold(f64::NEG_INFINITY, f64::max)
}

/// Maximum of `eval(i)` over `0..n` on the rayon pool. `max` is associative
/// and commutative, so the reduction is deterministic regardless of split.
#[cfg(feature = "parallel")]
pub fn sup_indexed_par(n: usize, eval: impl Fn(usize) -> f64 + Sync + Send) -> f64 {
    use rayon::prelude::*;
    (0..n)
        .into_par_iter()
        .map(eval)
        .reduce(|| f64::NEG_INFINITY, f64::max)
}

/// Maximum of `eval(i)` over `0..n`.
#[cfg(feature = "parallel")]
pub fn sup_indexed(n: usize, eval: impl Fn(usize) -> f64 + Sync + Send) -> f64 {
    if n >= 64 {
        sup_indexed_par(n, eval)
    } else {
        sup_indexed_seq(n, eval)
    }
}

/// Maximum of `eval(i)` over `0..n`.
#[cfg(not(feature = "parallel"))]
pub fn sup_indexed(n: usize, eval: impl Fn(usize) -> f64 + Sync + Send) -> f64 {
    sup_indexed_seq(n, eval)
}

/// Collect `eval(i)` for `0..n` in index order, sequential loop.
pub fn map_indexed_seq<T: Send>(n: usize, eval: impl Fn(usize) -> T) -> Vec<T> {
    (0..n).map(eval).collect()
}

/// Collect `eval(i)` for `0..n` in index order on the rayon pool.
#[cfg(feature = "parallel")]
pub fn map_indexed<T: Send>(n: usize, eval: impl Fn(usize) -> T + Sync + Send) -> Vec<T> {
    use rayon::prelude::*;
    (0..n).into_par_iter().map(eval).collect()
}

/// Collect `eval(i)` for `0..n` in index order.
#[cfg(not(feature = "parallel"))]
pub fn map_indexed<T: Send>(n: usize, eval: impl Fn(usize) -> T + Sync + Send) -> Vec<T> {
    map_indexed_seq(n, eval)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sup_matches_sequential() {
        let eval = |i: usize| ((i as f64) * 0.7).sin();
        let seq = sup_indexed_seq(1000, eval);
        let any = sup_indexed(1000, eval);
        assert_eq!(seq, any);
    }

    #[test]
    fn map_preserves_order() {
        let v = map_indexed(257, |i| i * 2);
        assert!(v.iter().enumerate().all(|(i, &x)| x == 2 * i));
    }
}
