use num_integer::Integer;
use num_traits::ToPrimitive;
use serde::Serialize;

use super::generator::{IndexVectors, RecurrenceGenerator};
use super::lattice::{scan_over, LatticeSet};
use super::torus::{torus_average_over, TorusSystem};
use crate::error::{Error, Result};

/// What a filtered recurrence average is measured on.
#[derive(Clone, Copy, Debug)]
pub enum RecurrenceTarget<'a> {
    Torus(&'a TorusSystem),
    Lattice(&'a LatticeSet),
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FilteredRecurrence {
    pub r: u64,
    pub n: usize,
    pub kept: usize,
    /// `kept / n`.
    pub relative_density: f64,
    /// Torus: mean of `mu(A ∩ T^-d A)`; lattice: mean of `d*(E ∩ (E - d))`.
    /// `None` when no index survives the filter.
    pub average: Option<f64>,
    /// Lattice only: fraction of kept `d` in `E - E`.
    pub hit_density: Option<f64>,
    /// `mu(A)^2` or `d*(E)^2`.
    pub baseline: f64,
    pub margin: Option<f64>,
}

/// Recurrence restricted to `D^(r)`, the `d_n` whose coordinates are all divisible by `r`.
pub fn filtered_recurrence(target: RecurrenceTarget<'_>, r: u64, psi: &IndexVectors) -> Result<FilteredRecurrence> {
    if r == 0 {
        return Err(Error::InvalidArgument("r must be >= 1".into()));
    }
    if psi.is_empty() {
        return Err(Error::Empty("no index vectors".into()));
    }
    let want = match target {
        RecurrenceTarget::Torus(t) => t.m(),
        RecurrenceTarget::Lattice(e) => e.k(),
    };
    if psi.dim != want {
        return Err(Error::Dimension(format!("target has dimension {want}, vectors {}", psi.dim)));
    }
    let idx: Vec<usize> = (0..psi.len())
        .filter(|&i| psi.vectors[i].iter().all(|&c| c.rem_euclid(r as i128) == 0))
        .collect();
    let (average, hit_density, baseline) = match target {
        RecurrenceTarget::Torus(t) => {
            let mu = t.mu_a().to_f64().unwrap();
            let avg = if idx.is_empty() {
                None
            } else {
                Some(torus_average_over(t, psi, &idx)?)
            };
            (avg, None, mu * mu)
        }
        RecurrenceTarget::Lattice(e) => {
            let d = e.density().to_f64().unwrap();
            if idx.is_empty() {
                (None, None, d * d)
            } else {
                let s = scan_over(e, psi, &idx);
                (Some(s.mean_intersection), Some(s.hit_density), d * d)
            }
        }
    };
    Ok(FilteredRecurrence {
        r,
        n: psi.len(),
        kept: idx.len(),
        relative_density: idx.len() as f64 / psi.len() as f64,
        average,
        hit_density,
        baseline,
        margin: average.map(|a| a - baseline),
    })
}

/// Limiting relative density of `D^(r)` in `D`, assuming every `[xi_j(p)]`
/// coordinate is jointly equidistributed mod `r` along each reduced class of
/// primes mod `r` (true for the non-polynomial families the generator targets).
///
/// Averages, over the `phi(r)` classes `p = t mod r` and all `r^k` residues of
/// the floor coordinates, the indicator that `L(...)` vanishes mod `r`.
pub fn predicted_filter_density(gen: &RecurrenceGenerator, r: u64) -> Result<f64> {
    if r == 0 {
        return Err(Error::InvalidArgument("r must be >= 1".into()));
    }
    let k = gen.exprs.len() as u32;
    let combos = (r as u128).pow(k);
    if combos * r as u128 > 10_000_000 {
        return Err(Error::InvalidArgument(format!("r^k = {r}^{k} too large to enumerate")));
    }
    let ri = r as i128;
    let mut hits = 0u128;
    let mut total = 0u128;
    for t in (0..r).filter(|t| t.gcd(&r) == 1) {
        let base = (t as i128 + gen.shift as i128).rem_euclid(ri);
        let mut raw: Vec<i128> = Vec::with_capacity(gen.poly_degree as usize + k as usize);
        let mut pow = 1i128;
        for _ in 0..gen.poly_degree {
            pow = (pow * base).rem_euclid(ri);
            raw.push(pow);
        }
        let poly_len = raw.len();
        raw.resize(poly_len + k as usize, 0);
        for code in 0..combos {
            let mut c = code;
            for j in 0..k as usize {
                raw[poly_len + j] = (c % r as u128) as i128;
                c /= r as u128;
            }
            let zero = match &gen.l_matrix {
                None => raw.iter().all(|v| v.rem_euclid(ri) == 0),
                Some(l) => l.iter().all(|row| {
                    row.iter()
                        .zip(&raw)
                        .fold(0i128, |acc, (&a, &v)| (acc + (a as i128).rem_euclid(ri) * v).rem_euclid(ri))
                        == 0
                }),
            };
            hits += zero as u128;
            total += 1;
        }
    }
    Ok(hits as f64 / total as f64)
}
