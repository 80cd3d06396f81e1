use num_complex::Complex64;
use serde::Serialize;

use super::generator::IndexVectors;
use crate::circle;
use crate::dd::frac_of_product;
use crate::error::{Error, Result};
use crate::parallel::chunked;
use crate::parallel::ComplexAccumulator;

/// Commuting diagonal unitaries `U_1, ..., U_k` on `C^dim`:
/// `U_i e_j = e(gamma[j][i]) e_j`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DiagonalUnitarySystem {
    k: usize,
    frequencies: Vec<Vec<f64>>,
    f: Vec<Complex64>,
}

impl DiagonalUnitarySystem {
    pub fn new(frequencies: Vec<Vec<f64>>, f: Vec<Complex64>) -> Result<Self> {
        let k = frequencies.first().map_or(0, Vec::len);
        if frequencies.is_empty() || k == 0 {
            return Err(Error::Empty("need dim >= 1 and k >= 1".into()));
        }
        if frequencies.iter().any(|row| row.len() != k) {
            return Err(Error::Dimension("ragged frequency matrix".into()));
        }
        if frequencies.iter().flatten().any(|g| !(0.0..1.0).contains(g)) {
            return Err(Error::Domain("frequencies must lie in [0, 1)".into()));
        }
        if f.len() != frequencies.len() {
            return Err(Error::Dimension(format!("f has length {}, dim is {}", f.len(), frequencies.len())));
        }
        Ok(Self { k, frequencies, f })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn dim(&self) -> usize {
        self.frequencies.len()
    }

    /// Rows fixed by every operator.
    pub fn is_invariant_row(&self, j: usize) -> bool {
        self.frequencies[j].iter().all(|&g| g == 0.0)
    }

    /// Orthogonal projection of `f` onto the joint invariant subspace.
    pub fn projection(&self) -> Vec<Complex64> {
        (0..self.dim())
            .map(|j| if self.is_invariant_row(j) { self.f[j] } else { Complex64::new(0.0, 0.0) })
            .collect()
    }

    /// Phase of `U^d` on row `j`, reduced mod 1 exactly.
    fn phase(&self, j: usize, d: &[i128]) -> f64 {
        let s: f64 = self.frequencies[j]
            .iter()
            .zip(d)
            .map(|(&g, &di)| frac_of_product(di, g))
            .sum();
        s - s.floor()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ErgodicAverage {
    pub n: usize,
    pub average: Vec<Complex64>,
    pub projection: Vec<Complex64>,
    /// Euclidean norm of `average - projection`.
    pub deviation: f64,
}

/// `(1/N) sum_{n <= N} U_1^{d_n,1} ... U_k^{d_n,k} f` against its limit, the
/// projection of `f` onto the invariant vectors.
pub fn ergodic_average(sys: &DiagonalUnitarySystem, d: &IndexVectors, chunk: usize) -> Result<ErgodicAverage> {
    if d.dim != sys.k {
        return Err(Error::Dimension(format!("{} operators but vectors of dimension {}", sys.k, d.dim)));
    }
    if d.is_empty() {
        return Err(Error::Empty("no index vectors".into()));
    }
    let dim = sys.dim();
    let parts = chunked(d.len(), chunk, |range| {
        let mut acc = vec![ComplexAccumulator::new(); dim];
        for v in &d.vectors[range] {
            for (j, a) in acc.iter_mut().enumerate() {
                if sys.is_invariant_row(j) {
                    a.push(Complex64::new(1.0, 0.0));
                } else {
                    a.push(circle(sys.phase(j, v)));
                }
            }
        }
        Ok(acc)
    })?;
    let mut total = vec![ComplexAccumulator::new(); dim];
    for p in &parts {
        for (t, a) in total.iter_mut().zip(p) {
            t.merge(a);
        }
    }
    let n = d.len() as f64;
    let average: Vec<Complex64> = total.iter().zip(&sys.f).map(|(t, &fj)| t.value() / n * fj).collect();
    let projection = sys.projection();
    let deviation = average
        .iter()
        .zip(&projection)
        .map(|(a, p)| (a - p).norm_sqr())
        .sum::<f64>()
        .sqrt();
    Ok(ErgodicAverage {
        n: d.len(),
        average,
        projection,
        deviation,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ergodic::prime_index_sequence;
    use crate::parallel::DEFAULT_CHUNK;
    use crate::primes::sieve;

    #[test]
    fn invariant_system_is_exact() {
        let t = sieve(10_000).unwrap();
        let d = prime_index_sequence(&["x^(3/2)".parse().unwrap()], 1000, &t, DEFAULT_CHUNK).unwrap();
        let f = vec![Complex64::new(0.3, -0.2), Complex64::new(1.0, 0.0)];
        let sys = DiagonalUnitarySystem::new(vec![vec![0.0], vec![0.0]], f.clone()).unwrap();
        let r = ergodic_average(&sys, &d, DEFAULT_CHUNK).unwrap();
        assert_eq!(r.average, f);
        assert_eq!(r.deviation, 0.0);
    }

    #[test]
    fn golden_rotation_decays() {
        let t = sieve(2_000_000).unwrap();
        let g = (5f64.sqrt() - 1.0) / 2.0;
        let sys = DiagonalUnitarySystem::new(vec![vec![g], vec![0.0]], vec![Complex64::new(1.0, 0.0); 2]).unwrap();
        let e = ["x^(1/2)".parse().unwrap()];
        let small = ergodic_average(&sys, &prime_index_sequence(&e, 1000, &t, 256).unwrap(), 256).unwrap();
        let big = ergodic_average(&sys, &prime_index_sequence(&e, 100_000, &t, 4096).unwrap(), 4096).unwrap();
        assert!(big.deviation < small.deviation);
        assert!(big.deviation < 0.05);
        assert_eq!(big.projection[1], Complex64::new(1.0, 0.0));
    }

    #[test]
    fn validation() {
        assert!(DiagonalUnitarySystem::new(vec![vec![1.0]], vec![Complex64::new(1.0, 0.0)]).is_err());
        assert!(DiagonalUnitarySystem::new(vec![vec![0.1], vec![0.1, 0.2]], vec![Complex64::new(1.0, 0.0); 2]).is_err());
        assert!(DiagonalUnitarySystem::new(vec![vec![0.1]], vec![]).is_err());
    }
}
