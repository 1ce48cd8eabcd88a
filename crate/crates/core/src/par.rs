//! Deterministic loop and reduction helpers.
//!
//! Reductions accumulate fixed-size chunks and combine the partials in index
//! order, so results are bitwise identical for any thread count and for the
//! sequential fallback (`--no-default-features`). Simulation output therefore
//! does not depend on how work was scheduled.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Chunk length for partial reductions and parallel fills.
pub(crate) const CHUNK: usize = 8192;

/// Fold `0..n` chunk by chunk, combining per-chunk accumulators in order.
pub(crate) fn chunked_fold<T, I, F, C>(n: usize, init: I, fold_chunk: F, combine: C) -> T
where
    T: Send,
    I: Fn() -> T + Sync,
    F: Fn(T, std::ops::Range<usize>) -> T + Sync,
    C: Fn(T, T) -> T,
{
    let ranges = |c: usize| {
        let start = c * CHUNK;
        start..n.min(start + CHUNK)
    };
    let n_chunks = n.div_ceil(CHUNK.max(1));
    #[cfg(feature = "parallel")]
    {
        let partials: Vec<T> = (0..n_chunks)
            .into_par_iter()
            .map(|c| fold_chunk(init(), ranges(c)))
            .collect();
        partials
            .into_iter()
            .fold(None::<T>, |acc, p| match acc {
                None => Some(p),
                Some(a) => Some(combine(a, p)),
            })
            .unwrap_or_else(init)
    }
    #[cfg(not(feature = "parallel"))]
    {
        let mut acc: Option<T> = None;
        for c in 0..n_chunks {
            let p = fold_chunk(init(), ranges(c));
            acc = Some(match acc {
                None => p,
                Some(a) => combine(a, p),
            });
        }
        acc.unwrap_or_else(init)
    }
}

/// `out[i] = f(i)` for all `i`.
pub(crate) fn fill_with<T, F>(out: &mut [T], f: F)
where
    T: Send,
    F: Fn(usize) -> T + Sync,
{
    #[cfg(feature = "parallel")]
    {
        out.par_chunks_mut(CHUNK).enumerate().for_each(|(c, chunk)| {
            let base = c * CHUNK;
            for (j, v) in chunk.iter_mut().enumerate() {
                *v = f(base + j);
            }
        });
    }
    #[cfg(not(feature = "parallel"))]
    {
        for (i, v) in out.iter_mut().enumerate() {
            *v = f(i);
        }
    }
}

/// `out[i] = f(i, out[i])` for all `i`.
pub(crate) fn update_with<T, F>(out: &mut [T], f: F)
where
    T: Copy + Send,
    F: Fn(usize, T) -> T + Sync,
{
    #[cfg(feature = "parallel")]
    {
        out.par_chunks_mut(CHUNK).enumerate().for_each(|(c, chunk)| {
            let base = c * CHUNK;
            for (j, v) in chunk.iter_mut().enumerate() {
                *v = f(base + j, *v);
            }
        });
    }
    #[cfg(not(feature = "parallel"))]
    {
        for (i, v) in out.iter_mut().enumerate() {
            *v = f(i, *v);
        }
    }
}

/// Deterministic chunked sum of `f(i)` over `0..n`.
pub(crate) fn sum_with<F>(n: usize, f: F) -> f64
where
    F: Fn(usize) -> f64 + Sync,
{
    chunked_fold(
        n,
        || 0.0,
        |mut acc, r| {
            for i in r {
                acc += f(i);
            }
            acc
        },
        |a, b| a + b,
    )
}

/// Maximum of `f(i)` over `0..n`; `f64::NEG_INFINITY` for `n == 0`.
/// NaN entries propagate as NaN so callers can detect them.
pub(crate) fn max_with<F>(n: usize, f: F) -> f64
where
    F: Fn(usize) -> f64 + Sync,
{
    chunked_fold(
        n,
        || f64::NEG_INFINITY,
        |mut acc, r| {
            for i in r {
                let v = f(i);
                if v > acc || v.is_nan() {
                    acc = v;
                }
            }
            acc
        },
        |a, b| if b > a || b.is_nan() { b } else { a },
    )
}

/// Result of a clip-and-scan pass over a field.
#[derive(Debug, Clone, Copy)]
pub(crate) struct ClipScan {
    /// Number of entries clipped from round-off-negative to zero.
    pub clipped: usize,
    /// Most negative value seen before clipping (`+inf` if none).
    pub min_negative: f64,
    /// False if any entry was NaN or infinite.
    pub finite: bool,
}

/// Clip entries in `[-allow, 0)` to zero; report the count, the worst
/// negative value, and finiteness. Entries below `-allow` are left alone for
/// the caller to reject.
pub(crate) fn clip_negative(data: &mut [f64], allow: f64) -> ClipScan {
    let scan_chunk = |chunk: &mut [f64]| {
        let mut s = ClipScan { clipped: 0, min_negative: f64::INFINITY, finite: true };
        for v in chunk.iter_mut() {
            if !v.is_finite() {
                s.finite = false;
            } else if *v < 0.0 {
                s.min_negative = s.min_negative.min(*v);
                if *v >= -allow {
                    *v = 0.0;
                    s.clipped += 1;
                }
            }
        }
        s
    };
    let combine = |a: ClipScan, b: ClipScan| ClipScan {
        clipped: a.clipped + b.clipped,
        min_negative: a.min_negative.min(b.min_negative),
        finite: a.finite && b.finite,
    };
    #[cfg(feature = "parallel")]
    {
        let partials: Vec<ClipScan> = data.par_chunks_mut(CHUNK).map(scan_chunk).collect();
        partials
            .into_iter()
            .fold(ClipScan { clipped: 0, min_negative: f64::INFINITY, finite: true }, combine)
    }
    #[cfg(not(feature = "parallel"))]
    {
        data.chunks_mut(CHUNK)
            .map(scan_chunk)
            .fold(ClipScan { clipped: 0, min_negative: f64::INFINITY, finite: true }, combine)
    }
}

/// True iff every entry is finite.
pub(crate) fn all_finite(data: &[f64]) -> bool {
    chunked_fold(
        data.len(),
        || true,
        |acc, r| acc && data[r].iter().all(|v| v.is_finite()),
        |a, b| a && b,
    )
}
