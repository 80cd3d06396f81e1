use num_rational::Rational64;
use num_traits::{One, ToPrimitive, Zero};
use serde::Serialize;

use super::generator::IndexVectors;
use crate::dd::frac_of_product;
use crate::error::{Error, Result};
use crate::parallel::{sum_real, DEFAULT_CHUNK};

/// Half-open box `prod [lo_i, hi_i)` in `[0, 1)^m` with rational corners.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TorusBox {
    pub lo: Vec<Rational64>,
    pub hi: Vec<Rational64>,
}

impl TorusBox {
    pub fn new(lo: Vec<Rational64>, hi: Vec<Rational64>) -> Result<Self> {
        if lo.len() != hi.len() || lo.is_empty() {
            return Err(Error::Dimension("box corners of unequal or zero length".into()));
        }
        let ok = lo
            .iter()
            .zip(&hi)
            .all(|(a, b)| *a >= Rational64::zero() && a < b && *b <= Rational64::one());
        if !ok {
            return Err(Error::Domain("box sides must satisfy 0 <= lo < hi <= 1".into()));
        }
        Ok(Self { lo, hi })
    }

    pub fn volume(&self) -> Rational64 {
        self.lo.iter().zip(&self.hi).map(|(a, b)| b - a).product()
    }

    fn overlaps(&self, other: &Self) -> bool {
        self.lo
            .iter()
            .zip(&self.hi)
            .zip(other.lo.iter().zip(&other.hi))
            .all(|((a1, b1), (a2, b2))| a1 < b2 && a2 < b1)
    }
}

/// `m` commuting rotations `T_i x = x + alpha_i` of `T^m` and a set `A` given
/// as a disjoint union of boxes.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TorusSystem {
    m: usize,
    alphas: Vec<Vec<f64>>,
    boxes: Vec<TorusBox>,
    #[serde(serialize_with = "ser_ratio")]
    mu_a: Rational64,
}

fn ser_ratio<S: serde::Serializer>(r: &Rational64, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&r.to_string())
}

impl TorusSystem {
    pub fn new(alphas: Vec<Vec<f64>>, boxes: Vec<TorusBox>) -> Result<Self> {
        let m = alphas.len();
        if m == 0 || boxes.is_empty() {
            return Err(Error::Empty("need m >= 1 rotations and a non-empty set".into()));
        }
        if alphas.iter().any(|a| a.len() != m) || boxes.iter().any(|b| b.lo.len() != m) {
            return Err(Error::Dimension(format!("rotations and boxes must live in T^{m}")));
        }
        if alphas.iter().flatten().any(|a| !(0.0..1.0).contains(a)) {
            return Err(Error::Domain("rotation vectors must lie in [0, 1)^m".into()));
        }
        for i in 0..boxes.len() {
            for j in i + 1..boxes.len() {
                if boxes[i].overlaps(&boxes[j]) {
                    return Err(Error::InvalidArgument(format!("boxes {i} and {j} overlap")));
                }
            }
        }
        let mu_a = boxes.iter().map(TorusBox::volume).sum();
        Ok(Self {
            m,
            alphas,
            boxes,
            mu_a,
        })
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn mu_a(&self) -> Rational64 {
        self.mu_a
    }

    /// `sum_i psi_i alpha_i mod 1`.
    pub fn translation(&self, psi: &[i128]) -> Vec<f64> {
        (0..self.m)
            .map(|j| {
                let s: f64 = psi.iter().zip(&self.alphas).map(|(&c, a)| frac_of_product(c, a[j])).sum();
                s - s.floor()
            })
            .collect()
    }

    /// `mu(A ∩ (A - v))`, by interval intersection over every pair of boxes.
    pub fn overlap(&self, v: &[f64]) -> f64 {
        let mut total = 0.0;
        for b1 in &self.boxes {
            for b2 in &self.boxes {
                let mut vol = 1.0;
                for j in 0..self.m {
                    vol *= circular_overlap(
                        b1.lo[j].to_f64().unwrap(),
                        b1.hi[j].to_f64().unwrap(),
                        b2.lo[j].to_f64().unwrap(),
                        b2.hi[j].to_f64().unwrap(),
                        v[j],
                    );
                    if vol == 0.0 {
                        break;
                    }
                }
                total += vol;
            }
        }
        total
    }
}

/// Length of `[a1, b1) ∩ ([a2, b2) - v mod 1)` for `v` in `[0, 1)`.
fn circular_overlap(a1: f64, b1: f64, a2: f64, b2: f64, v: f64) -> f64 {
    let seg = |lo: f64, hi: f64| (b1.min(hi) - a1.max(lo)).max(0.0);
    seg(a2 - v, b2 - v) + seg(a2 - v + 1.0, b2 - v + 1.0)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RecurrenceAverage {
    pub n: usize,
    pub average: f64,
    pub mu_sq: f64,
    /// `average - mu(A)^2`.
    pub margin: f64,
}

/// `(1/N) sum_n mu(A ∩ T^{-psi(p_n)} A)` against `mu(A)^2`.
pub fn torus_recurrence_average(sys: &TorusSystem, psi: &IndexVectors, chunk: usize) -> Result<RecurrenceAverage> {
    if psi.dim != sys.m {
        return Err(Error::Dimension(format!("{} rotations but vectors of dimension {}", sys.m, psi.dim)));
    }
    if psi.is_empty() {
        return Err(Error::Empty("no index vectors".into()));
    }
    let total = sum_real(psi.len(), chunk.max(1), |i| Ok(sys.overlap(&sys.translation(&psi.vectors[i]))))?;
    let average = total / psi.len() as f64;
    let mu = sys.mu_a.to_f64().unwrap();
    Ok(RecurrenceAverage {
        n: psi.len(),
        average,
        mu_sq: mu * mu,
        margin: average - mu * mu,
    })
}

/// Overlap averages restricted to the listed indices (for filtered recurrence).
pub(crate) fn torus_average_over(sys: &TorusSystem, psi: &IndexVectors, idx: &[usize]) -> Result<f64> {
    let total = sum_real(idx.len(), DEFAULT_CHUNK, |i| {
        Ok(sys.overlap(&sys.translation(&psi.vectors[idx[i]])))
    })?;
    Ok(total / idx.len() as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ergodic::{prime_index_sequence, RecurrenceGenerator};
    use crate::primes::sieve;

    fn r(n: i64, d: i64) -> Rational64 {
        Rational64::new(n, d)
    }

    fn interval(a: Rational64, b: Rational64) -> TorusBox {
        TorusBox::new(vec![a], vec![b]).unwrap()
    }

    #[test]
    fn overlap_geometry() {
        assert!((circular_overlap(0.0, 0.5, 0.0, 0.5, 0.25) - 0.25).abs() < 1e-15);
        assert!((circular_overlap(0.0, 0.5, 0.0, 0.5, 0.75) - 0.25).abs() < 1e-15);
        assert!((circular_overlap(0.0, 0.5, 0.0, 0.5, 0.5)).abs() < 1e-15);
        assert!((circular_overlap(0.0, 1.0, 0.0, 1.0, 0.3) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn zero_rotation_and_full_torus() {
        let t = sieve(10_000).unwrap();
        let d = prime_index_sequence(&["x^(3/2)".parse().unwrap()], 500, &t, 64).unwrap();
        let sys = TorusSystem::new(vec![vec![0.0]], vec![interval(r(1, 10), r(1, 2))]).unwrap();
        let a = torus_recurrence_average(&sys, &d, 64).unwrap();
        assert!((a.average - 0.4).abs() < 1e-15);
        let full = TorusSystem::new(vec![vec![2f64.sqrt() - 1.0]], vec![interval(r(0, 1), r(1, 1))]).unwrap();
        let a = torus_recurrence_average(&full, &d, 64).unwrap();
        assert!((a.average - 1.0).abs() < 1e-12);
        assert!(a.margin.abs() < 1e-12);
    }

    #[test]
    fn irrational_half_interval() {
        let t = sieve(200_000).unwrap();
        let d = prime_index_sequence(&["x^(3/2)".parse().unwrap()], 10_000, &t, 1024).unwrap();
        let sys = TorusSystem::new(vec![vec![2f64.sqrt() - 1.0]], vec![interval(r(0, 1), r(1, 2))]).unwrap();
        assert_eq!(sys.mu_a(), r(1, 2));
        let a = torus_recurrence_average(&sys, &d, 1024).unwrap();
        assert!(a.margin >= -0.01, "{a:?}");
    }

    #[test]
    fn rational_rotation_needs_the_shift() {
        let t = sieve(100_000).unwrap();
        let sys = TorusSystem::new(vec![vec![0.5]], vec![interval(r(0, 1), r(1, 2))]).unwrap();
        let plus = RecurrenceGenerator::new(1, vec![], None, 1).unwrap().generate(1000, &t, 64).unwrap();
        let a = torus_recurrence_average(&sys, &plus, 64).unwrap();
        assert!(a.average > 0.49);
        let bare = RecurrenceGenerator::new(1, vec![], None, 0).unwrap().generate(1000, &t, 64).unwrap();
        let a = torus_recurrence_average(&sys, &bare, 64).unwrap();
        assert!(a.margin < -0.2);
    }

    #[test]
    fn validation() {
        assert!(TorusBox::new(vec![r(1, 2)], vec![r(1, 4)]).is_err());
        let b = interval(r(0, 1), r(1, 2));
        let c = interval(r(1, 4), r(3, 4));
        assert!(TorusSystem::new(vec![vec![0.1]], vec![b.clone(), c]).is_err());
        assert!(TorusSystem::new(vec![vec![0.1, 0.2]], vec![b.clone()]).is_err());
        assert!(TorusSystem::new(vec![vec![1.5]], vec![b]).is_err());
    }
}
