use std::collections::BTreeMap;

use num_complex::Complex64;
use serde::Serialize;

use super::generator::IndexVectors;
use crate::circle;
use crate::dd::frac_of_product;
use crate::error::{Error, Result};
use crate::parallel::ComplexAccumulator;

/// Grid points per axis for the density nonnegativity check.
const DENSITY_GRID: usize = 64;

/// A finite positive measure on `T^k`: point masses plus an absolutely
/// continuous part with trigonometric-polynomial density
/// `w(x) = sum_m c_m e(m . x)`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SpectralMeasure {
    k: usize,
    atoms: Vec<(Vec<f64>, f64)>,
    density: BTreeMap<Vec<i64>, Complex64>,
}

impl SpectralMeasure {
    pub fn new(k: usize, atoms: Vec<(Vec<f64>, f64)>, density: BTreeMap<Vec<i64>, Complex64>) -> Result<Self> {
        if k == 0 || k > 3 {
            return Err(Error::InvalidArgument(format!("dimension {k} outside 1..=3")));
        }
        for (loc, mass) in &atoms {
            if loc.len() != k || loc.iter().any(|x| !(0.0..1.0).contains(x)) {
                return Err(Error::Domain("atom locations must lie in [0, 1)^k".into()));
            }
            if !(*mass > 0.0) || !mass.is_finite() {
                return Err(Error::Domain("atom masses must be positive".into()));
            }
        }
        if density.keys().any(|m| m.len() != k) {
            return Err(Error::Dimension("density frequency of wrong length".into()));
        }
        let sigma = Self { k, atoms, density };
        sigma.check_density()?;
        if !(sigma.total_mass() > 0.0) {
            return Err(Error::Domain("total mass must be positive".into()));
        }
        Ok(sigma)
    }

    pub fn point_mass(loc: Vec<f64>, mass: f64) -> Result<Self> {
        Self::new(loc.len(), vec![(loc, mass)], BTreeMap::new())
    }

    pub fn lebesgue(k: usize) -> Result<Self> {
        Self::new(k, vec![], BTreeMap::from([(vec![0; k], Complex64::new(1.0, 0.0))]))
    }

    fn density_at(&self, x: &[f64]) -> Complex64 {
        self.density
            .iter()
            .map(|(m, c)| c * circle(m.iter().zip(x).map(|(&mi, &xi)| mi as f64 * xi).sum()))
            .sum()
    }

    /// The density must be real (`c_-m = conj c_m`) and nonnegative on a grid.
    fn check_density(&self) -> Result<()> {
        for (m, c) in &self.density {
            let neg: Vec<i64> = m.iter().map(|v| -v).collect();
            let partner = self.density.get(&neg).copied().unwrap_or_default();
            if (partner - c.conj()).norm() > 1e-12 {
                return Err(Error::Domain(format!("density coefficient {m:?} lacks its conjugate partner")));
            }
        }
        if self.density.is_empty() {
            return Ok(());
        }
        let cells = DENSITY_GRID.pow(self.k as u32);
        for idx in 0..cells {
            let mut c = idx;
            let x: Vec<f64> = (0..self.k)
                .map(|_| {
                    let v = (c % DENSITY_GRID) as f64 / DENSITY_GRID as f64;
                    c /= DENSITY_GRID;
                    v
                })
                .collect();
            if self.density_at(&x).re < -1e-12 {
                return Err(Error::Domain(format!("density negative at {x:?}")));
            }
        }
        Ok(())
    }

    pub fn total_mass(&self) -> f64 {
        self.atoms.iter().map(|a| a.1).sum::<f64>() + self.density.get(&vec![0; self.k]).map_or(0.0, |c| c.re)
    }

    /// `sigma({0})`.
    pub fn mass_at_zero(&self) -> f64 {
        self.atoms.iter().filter(|(loc, _)| loc.iter().all(|&x| x == 0.0)).map(|a| a.1).sum()
    }

    /// `sigma^(d) = int e(-d . x) dsigma(x)`.
    pub fn fourier(&self, d: &[i128]) -> Complex64 {
        let mut acc = ComplexAccumulator::new();
        for (loc, mass) in &self.atoms {
            let s: f64 = d.iter().zip(loc).map(|(&di, &x)| frac_of_product(di, x)).sum();
            acc.push(circle(-(s - s.floor())) * mass);
        }
        let key: Option<Vec<i64>> = d.iter().map(|&v| i64::try_from(v).ok()).collect();
        if let Some(c) = key.and_then(|k| self.density.get(&k)) {
            acc.push(*c);
        }
        acc.value()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FcProbe {
    pub n: usize,
    pub mass_at_zero: f64,
    /// `(n_j, max_{n_j <= m <= N} |sigma^(d_m)|)` at `n_j = max(1, jN/10)`, `j = 0..10`.
    pub running_max_tail: Vec<(usize, f64)>,
    /// The last envelope entry, over `m >= 9N/10`; stands in for the limsup.
    pub final_tail_max: f64,
}

/// Evaluate `|sigma^(d_m)|` along the sequence and its tail-max envelope.
pub fn fcplus_probe(sigma: &SpectralMeasure, d: &IndexVectors) -> Result<FcProbe> {
    if d.dim != sigma.k {
        return Err(Error::Dimension(format!("measure on T^{} but vectors of dimension {}", sigma.k, d.dim)));
    }
    if d.is_empty() {
        return Err(Error::Empty("no index vectors".into()));
    }
    let n = d.len();
    let mut suffix: Vec<f64> = d.vectors.iter().map(|v| sigma.fourier(v).norm()).collect();
    for i in (0..n - 1).rev() {
        suffix[i] = suffix[i].max(suffix[i + 1]);
    }
    let running_max_tail: Vec<(usize, f64)> = (0..10)
        .map(|j| {
            let start = (j * n / 10).max(1);
            (start, suffix[start - 1])
        })
        .collect();
    Ok(FcProbe {
        n,
        mass_at_zero: sigma.mass_at_zero(),
        final_tail_max: running_max_tail.last().unwrap().1,
        running_max_tail,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ResidueIndicator {
    /// `(1/q) sum_{j=1}^{q} e((n - b) j / q)`.
    pub via_sum: Complex64,
    /// `1` if `n = b mod q`, else `0`.
    pub direct: u8,
    pub agree: bool,
}

pub fn residue_indicator_check(q: u64, b: u64, n: i64) -> Result<ResidueIndicator> {
    if q == 0 || b == 0 || b > q {
        return Err(Error::InvalidArgument(format!("need 1 <= b <= q, got b={b}, q={q}")));
    }
    let qi = q as i128;
    let diff = (n as i128 - b as i128).rem_euclid(qi);
    let mut acc = ComplexAccumulator::new();
    for j in 1..=qi {
        let num = (diff * j).rem_euclid(qi);
        acc.push(circle(num as f64 / q as f64));
    }
    let via_sum = acc.value() / q as f64;
    let direct = (diff == 0) as u8;
    let agree = (via_sum - Complex64::new(direct as f64, 0.0)).norm() < 1e-12;
    Ok(ResidueIndicator { via_sum, direct, agree })
}
