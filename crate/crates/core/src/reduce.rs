//! Deterministic summation.
//!
//! Every parallel reduction in the crate goes through these helpers: the index
//! range is cut into fixed-size chunks, each chunk is summed sequentially, and
//! the chunk totals are combined with a fixed pairwise tree. The result is
//! bit-identical for any thread count.

use num_complex::Complex64;
use rayon::prelude::*;
use std::ops::{Add, Range};

const CHUNK: usize = 1024;

fn pairwise<T: Copy + Add<Output = T>>(xs: &[T], zero: T) -> T {
    match xs.len() {
        0 => zero,
        1 => xs[0],
        n if n <= 8 => xs[1..].iter().fold(xs[0], |acc, &x| acc + x),
        n => {
            let (a, b) = xs.split_at(n / 2);
            pairwise(a, zero) + pairwise(b, zero)
        }
    }
}

pub fn sum_f64(xs: &[f64]) -> f64 {
    pairwise(xs, 0.0)
}

pub fn sum_c64(xs: &[Complex64]) -> Complex64 {
    pairwise(xs, Complex64::new(0.0, 0.0))
}

/// Sum `term(i)` over `range` in parallel with a thread-count independent tree.
pub fn par_sum_f64<F>(range: Range<usize>, term: F) -> f64
where
    F: Fn(usize) -> f64 + Sync,
{
    let chunks = chunk_bounds(range);
    let partial: Vec<f64> = chunks
        .par_iter()
        .map(|r| {
            let v: Vec<f64> = r.clone().map(&term).collect();
            sum_f64(&v)
        })
        .collect();
    sum_f64(&partial)
}

pub fn par_sum_c64<F>(range: Range<usize>, term: F) -> Complex64
where
    F: Fn(usize) -> Complex64 + Sync,
{
    let chunks = chunk_bounds(range);
    let partial: Vec<Complex64> = chunks
        .par_iter()
        .map(|r| {
            let v: Vec<Complex64> = r.clone().map(&term).collect();
            sum_c64(&v)
        })
        .collect();
    sum_c64(&partial)
}

fn chunk_bounds(range: Range<usize>) -> Vec<Range<usize>> {
    let mut out = Vec::new();
    let mut lo = range.start;
    while lo < range.end {
        let hi = (lo + CHUNK).min(range.end);
        out.push(lo..hi);
        lo = hi;
    }
    out
}
