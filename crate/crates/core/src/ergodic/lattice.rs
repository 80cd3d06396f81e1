use num_rational::Rational64;
use num_traits::ToPrimitive;
use serde::Serialize;

use super::generator::IndexVectors;
use crate::error::{Error, Result};

/// Largest fundamental box accepted; the difference set is quadratic in it.
pub const MAX_CELLS: usize = 1 << 12;

/// A periodic subset of `Z^k`: `n` is in `E` iff `mask[n mod period]`.
///
/// For periodic sets the upper Banach density is the mask density, exactly.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LatticeSet {
    period: Vec<u64>,
    mask: Vec<bool>,
    #[serde(serialize_with = "ser_ratio")]
    density: Rational64,
    #[serde(skip)]
    difference: Vec<bool>,
}

fn ser_ratio<S: serde::Serializer>(r: &Rational64, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&r.to_string())
}

impl LatticeSet {
    /// `mask` is row-major over `prod [0, period_i)`, last coordinate fastest.
    pub fn new(period: Vec<u64>, mask: Vec<bool>) -> Result<Self> {
        if period.is_empty() || period.contains(&0) {
            return Err(Error::InvalidArgument("periods must be positive and k >= 1".into()));
        }
        let cells = period
            .iter()
            .try_fold(1usize, |acc, &p| acc.checked_mul(p as usize))
            .filter(|&c| c <= MAX_CELLS)
            .ok_or_else(|| Error::InvalidArgument(format!("fundamental box larger than {MAX_CELLS} cells")))?;
        if mask.len() != cells {
            return Err(Error::Dimension(format!("mask has {} cells, box has {cells}", mask.len())));
        }
        let members = mask.iter().filter(|&&b| b).count();
        if members == 0 {
            return Err(Error::Empty("the set is empty".into()));
        }
        let mut set = Self {
            density: Rational64::new(members as i64, cells as i64),
            period,
            mask,
            difference: Vec::new(),
        };
        set.difference = set.difference_mask();
        Ok(set)
    }

    /// `{n : n = 0 mod modulus}` in each coordinate direction: `(mZ)^k`.
    pub fn multiples(modulus: u64, k: usize) -> Result<Self> {
        let period = vec![modulus; k];
        let cells = (modulus as usize).pow(k as u32);
        let mut mask = vec![false; cells];
        mask[0] = true;
        Self::new(period, mask)
    }

    pub fn k(&self) -> usize {
        self.period.len()
    }

    pub fn density(&self) -> Rational64 {
        self.density
    }

    fn cells(&self) -> usize {
        self.mask.len()
    }

    fn decode(&self, mut idx: usize) -> Vec<u64> {
        let mut out = vec![0; self.k()];
        for i in (0..self.k()).rev() {
            let p = self.period[i] as usize;
            out[i] = (idx % p) as u64;
            idx /= p;
        }
        out
    }

    fn encode(&self, v: &[i128]) -> usize {
        v.iter()
            .zip(&self.period)
            .fold(0usize, |acc, (&c, &p)| acc * p as usize + c.rem_euclid(p as i128) as usize)
    }

    fn members(&self) -> Vec<Vec<u64>> {
        (0..self.cells()).filter(|&i| self.mask[i]).map(|i| self.decode(i)).collect()
    }

    fn difference_mask(&self) -> Vec<bool> {
        let members = self.members();
        let mut diff = vec![false; self.cells()];
        for a in &members {
            for b in &members {
                let d: Vec<i128> = a.iter().zip(b).map(|(&x, &y)| x as i128 - y as i128).collect();
                diff[self.encode(&d)] = true;
            }
        }
        diff
    }

    pub fn contains(&self, v: &[i128]) -> bool {
        self.mask[self.encode(v)]
    }

    /// Whether `v` lies in `E - E`.
    pub fn in_difference_set(&self, v: &[i128]) -> bool {
        self.difference[self.encode(v)]
    }

    /// Density of `E ∩ (E - v)`.
    pub fn intersection_density(&self, v: &[i128]) -> f64 {
        let hits = (0..self.cells())
            .filter(|&i| {
                self.mask[i] && {
                    let shifted: Vec<i128> = self.decode(i).iter().zip(v).map(|(&c, &d)| c as i128 + d).collect();
                    self.contains(&shifted)
                }
            })
            .count();
        hits as f64 / self.cells() as f64
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LatticeScan {
    pub n: usize,
    pub hits: usize,
    /// `#{n <= N : d_n in E - E} / N`.
    pub hit_density: f64,
    /// Mean of `d*(E ∩ (E - d_n))`.
    pub mean_intersection: f64,
    pub dstar_sq: f64,
}

pub fn lattice_recurrence_scan(set: &LatticeSet, psi: &IndexVectors) -> Result<LatticeScan> {
    if psi.dim != set.k() {
        return Err(Error::Dimension(format!("set in Z^{} but vectors of dimension {}", set.k(), psi.dim)));
    }
    if psi.is_empty() {
        return Err(Error::Empty("no index vectors".into()));
    }
    let idx: Vec<usize> = (0..psi.len()).collect();
    Ok(scan_over(set, psi, &idx))
}

pub(crate) fn scan_over(set: &LatticeSet, psi: &IndexVectors, idx: &[usize]) -> LatticeScan {
    let hits = idx.iter().filter(|&&i| set.in_difference_set(&psi.vectors[i])).count();
    let inter: f64 = idx.iter().map(|&i| set.intersection_density(&psi.vectors[i])).sum();
    let n = idx.len();
    let d = set.density.to_f64().unwrap();
    LatticeScan {
        n,
        hits,
        hit_density: hits as f64 / n as f64,
        mean_intersection: inter / n as f64,
        dstar_sq: d * d,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ergodic::{prime_index_sequence, RecurrenceGenerator};
    use crate::primes::sieve;

    #[test]
    fn multiples_of_five() {
        let e = LatticeSet::multiples(5, 1).unwrap();
        assert_eq!(e.density(), Rational64::new(1, 5));
        assert!(e.in_difference_set(&[-10]));
        assert!(!e.in_difference_set(&[3]));
        let t = sieve(200_000).unwrap();
        let d = prime_index_sequence(&["x^(3/2)".parse().unwrap()], 10_000, &t, 1024).unwrap();
        let s = lattice_recurrence_scan(&e, &d).unwrap();
        assert!((s.hit_density - 0.2).abs() < 0.02);
        assert!(s.hit_density >= s.dstar_sq - 0.02);
    }

    #[test]
    fn whole_lattice() {
        let e = LatticeSet::new(vec![1, 1], vec![true]).unwrap();
        let t = sieve(1000).unwrap();
        let d = prime_index_sequence(&["x".parse().unwrap(), "x^(1/2)".parse().unwrap()], 100, &t, 16).unwrap();
        let s = lattice_recurrence_scan(&e, &d).unwrap();
        assert_eq!(s.hit_density, 1.0);
        assert_eq!(s.mean_intersection, 1.0);
    }

    #[test]
    fn even_numbers_along_p_plus_one() {
        let e = LatticeSet::multiples(2, 1).unwrap();
        let t = sieve(100_000).unwrap();
        let d = RecurrenceGenerator::new(1, vec![], None, 1).unwrap().generate(1000, &t, 64).unwrap();
        let s = lattice_recurrence_scan(&e, &d).unwrap();
        assert_eq!(s.hits, 999);
    }

    #[test]
    fn difference_set_of_a_pattern() {
        // E = {0, 1} mod 4: E - E = {-1, 0, 1} mod 4
        let e = LatticeSet::new(vec![4], vec![true, true, false, false]).unwrap();
        assert!(e.in_difference_set(&[3]) && e.in_difference_set(&[1]) && !e.in_difference_set(&[2]));
        assert_eq!(e.intersection_density(&[1]), 0.25);
        assert!(LatticeSet::new(vec![2], vec![false, false]).is_err());
        assert!(LatticeSet::new(vec![2], vec![true]).is_err());
        assert!(LatticeSet::new(vec![100, 100], vec![true; 10_000]).is_err());
    }
}
