//! Deterministic chunked parallelism.
//!
//! Work over an index range is cut into fixed-size chunks, each chunk is
//! processed sequentially, and the per-chunk results come back in ascending
//! chunk order. Merging them in that order makes every reduction
//! bit-identical for a given chunk size, whatever the thread count.

use std::ops::Range;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::dd::DoubleDouble;
use crate::error::Result;

pub const DEFAULT_CHUNK: usize = 4096;

/// Run `f` on consecutive chunks of `0..len` in parallel; results are in chunk order.
pub fn chunked<T, F>(len: usize, chunk: usize, f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(Range<usize>) -> Result<T> + Sync,
{
    let chunk = chunk.max(1);
    let n_chunks = len.div_ceil(chunk);
    (0..n_chunks)
        .into_par_iter()
        .map(|c| {
            let start = c * chunk;
            f(start..(start + chunk).min(len))
        })
        .collect()
}

/// Compensated accumulator for complex sums (double-double per component).
#[derive(Clone, Copy, Debug, Default)]
pub struct ComplexAccumulator {
    re: DoubleDouble,
    im: DoubleDouble,
}

impl ComplexAccumulator {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn push(&mut self, z: Complex64) {
        self.re = self.re.add_f64(z.re);
        self.im = self.im.add_f64(z.im);
    }

    pub fn merge(&mut self, other: &Self) {
        self.re = self.re + other.re;
        self.im = self.im + other.im;
    }

    pub fn value(&self) -> Complex64 {
        Complex64::new(self.re.to_f64(), self.im.to_f64())
    }
}

/// `sum_{i < len} term(i)` with compensated accumulation and ordered merge.
pub fn sum_complex<F>(len: usize, chunk: usize, term: F) -> Result<Complex64>
where
    F: Fn(usize) -> Result<Complex64> + Sync,
{
    let parts = chunked(len, chunk, |range| {
        let mut acc = ComplexAccumulator::new();
        for i in range {
            acc.push(term(i)?);
        }
        Ok(acc)
    })?;
    let mut total = ComplexAccumulator::new();
    for p in &parts {
        total.merge(p);
    }
    Ok(total.value())
}

/// Real-valued counterpart of [`sum_complex`].
pub fn sum_real<F>(len: usize, chunk: usize, term: F) -> Result<f64>
where
    F: Fn(usize) -> Result<f64> + Sync,
{
    sum_complex(len, chunk, |i| term(i).map(|v| Complex64::new(v, 0.0))).map(|z| z.re)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn chunk_results_keep_order() {
        let parts = chunked(10, 3, |r| Ok(r.start)).unwrap();
        assert_eq!(parts, vec![0, 3, 6, 9]);
        assert!(chunked(0, 3, |r| Ok(r.start)).unwrap().is_empty());
    }

    #[test]
    fn sum_is_independent_of_thread_count() {
        let term = |i: usize| Ok(Complex64::new((i as f64).sqrt().sin(), 1.0 / (1.0 + i as f64)));
        let a = sum_complex(100_000, 512, term).unwrap();
        let pool = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
        let b = pool.install(|| sum_complex(100_000, 512, term).unwrap());
        assert_eq!(a.re.to_bits(), b.re.to_bits());
        assert_eq!(a.im.to_bits(), b.im.to_bits());
    }
}
