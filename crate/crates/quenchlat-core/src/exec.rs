//! Deterministic execution of data-parallel loops.
//!
//! Every heavy loop in the crate (momentum-grid quadrature, Monte Carlo
//! batches, correlation fills) is expressed as a fold over fixed-size index
//! chunks: each chunk is reduced sequentially, and chunk partials are merged
//! in ascending chunk order. Because the chunking and the merge order do not
//! depend on the worker count, the parallel path produces bit-identical
//! results to the sequential one, and results are stable across `--threads`
//! settings.

/// Runtime choice between the sequential fallback and the rayon pool.
///
/// `Parallel` only exists when the crate is built with the `parallel`
/// feature (the default); without it the sequential path is the only one.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ExecMode {
    Sequential,
    #[cfg(feature = "parallel")]
    Parallel,
}

impl Default for ExecMode {
    /// Parallel when available, sequential otherwise.
    fn default() -> Self {
        #[cfg(feature = "parallel")]
        {
            ExecMode::Parallel
        }
        #[cfg(not(feature = "parallel"))]
        {
            ExecMode::Sequential
        }
    }
}

/// Split `0..n` into chunks of `chunk_size`, evaluate each chunk with
/// `eval_chunk` (sequentially within the chunk), and merge the partials in
/// chunk order with `merge`.
///
/// The sequential path uses the exact same two-phase structure, so both
/// modes perform the same floating-point operations in the same order.
pub fn chunked_fold<A, EV, ME>(
    mode: ExecMode,
    n: usize,
    chunk_size: usize,
    eval_chunk: EV,
    merge: ME,
    empty: A,
) -> A
where
    A: Send,
    EV: Fn(std::ops::Range<usize>) -> A + Sync,
    ME: Fn(A, A) -> A,
{
    assert!(chunk_size > 0, "chunk size must be positive");
    if n == 0 {
        return empty;
    }
    let n_chunks = n.div_ceil(chunk_size);
    let chunk_range = |c: usize| {
        let lo = c * chunk_size;
        let hi = ((c + 1) * chunk_size).min(n);
        lo..hi
    };

    let partials: Vec<A> = match mode {
        ExecMode::Sequential => (0..n_chunks).map(|c| eval_chunk(chunk_range(c))).collect(),
        #[cfg(feature = "parallel")]
        ExecMode::Parallel => {
            use rayon::prelude::*;
            (0..n_chunks)
                .into_par_iter()
                .map(|c| eval_chunk(chunk_range(c)))
                .collect()
        }
    };

    partials.into_iter().fold(empty, merge)
}

/// Sum `eval(i)` over `0..n` with deterministic chunked reduction.
pub fn chunked_sum<EV>(mode: ExecMode, n: usize, chunk_size: usize, eval: EV) -> f64
where
    EV: Fn(usize) -> f64 + Sync,
{
    chunked_fold(
        mode,
        n,
        chunk_size,
        |range| range.map(&eval).sum::<f64>(),
        |a, b| a + b,
        0.0,
    )
}

/// Evaluate `eval(i)` for `i` in `0..n` into a vector (order preserved).
pub fn indexed_map<T, EV>(mode: ExecMode, n: usize, chunk_size: usize, eval: EV) -> Vec<T>
where
    T: Send,
    EV: Fn(usize) -> T + Sync,
{
    chunked_fold(
        mode,
        n,
        chunk_size,
        |range| range.map(&eval).collect::<Vec<T>>(),
        |mut a, mut b| {
            a.append(&mut b);
            a
        },
        Vec::new(),
    )
}

/// All execution modes available in this build (used by tests and benches to
/// compare paths).
pub fn available_modes() -> Vec<ExecMode> {
    #[cfg(feature = "parallel")]
    {
        vec![ExecMode::Sequential, ExecMode::Parallel]
    }
    #[cfg(not(feature = "parallel"))]
    {
        vec![ExecMode::Sequential]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fold_covers_all_indices_once() {
        for &mode in &available_modes() {
            let total = chunked_sum(mode, 1000, 17, |i| i as f64);
            assert_eq!(total, (0..1000).map(|i| i as f64).sum::<f64>());
        }
    }

    #[test]
    fn modes_are_bit_identical() {
        // A sum whose value depends on association order if chunking differed.
        let eval = |i: usize| ((i as f64) * 0.37).sin() * 1e-3 + ((i % 7) as f64).sqrt();
        let seq = chunked_sum(ExecMode::Sequential, 12345, 256, eval);
        for &mode in &available_modes() {
            let v = chunked_sum(mode, 12345, 256, eval);
            assert_eq!(v.to_bits(), seq.to_bits());
        }
    }

    #[test]
    fn indexed_map_preserves_order() {
        for &mode in &available_modes() {
            let v = indexed_map(mode, 100, 7, |i| i * i);
            assert_eq!(v, (0..100).map(|i| i * i).collect::<Vec<_>>());
        }
    }

    #[test]
    fn empty_range() {
        assert_eq!(chunked_sum(ExecMode::Sequential, 0, 8, |_| 1.0), 0.0);
    }
}
