use num_integer::Integer;
use serde::Serialize;

use super::sieve::PrimeTable;
use crate::error::{Error, Result};

fn totient(mut q: u64) -> u64 {
    let mut out = q;
    let mut p = 2;
    while p * p <= q {
        if q % p == 0 {
            while q % p == 0 {
                q /= p;
            }
            out -= out / p;
        }
        p += 1;
    }
    if q > 1 {
        out -= out / q;
    }
    out
}

/// `pi(x; q, a)`, the number of primes `p <= x` with `p = a mod q`.
pub fn primes_in_ap(table: &PrimeTable, q: u64, a: i64, x: u64) -> Result<u64> {
    if q == 0 {
        return Err(Error::InvalidArgument("modulus must be >= 1".into()));
    }
    let r = a.rem_euclid(q as i64) as u64;
    let g = r.gcd(&q);
    if g != 1 {
        return Err(Error::NotCoprime { a, q, gcd: g });
    }
    Ok(table.up_to(x)?.iter().filter(|&&p| p % q == r).count() as u64)
}

/// Logarithmic integral `Li(x) = int_2^x dt / log t`, by Simpson's rule in `s = log t`.
pub fn li(x: f64) -> f64 {
    if x <= 2.0 {
        return 0.0;
    }
    let (a, b) = (2f64.ln(), x.ln());
    let n = 4096usize;
    let h = (b - a) / n as f64;
    let f = |s: f64| s.exp() / s;
    let mut acc = f(a) + f(b);
    for i in 1..n {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        acc += w * f(a + i as f64 * h);
    }
    acc * h / 3.0
}

#[derive(Clone, Debug, Serialize)]
pub struct ResidueRow {
    pub a: u64,
    pub count: u64,
    /// `count * phi(q) / pi(x)`.
    pub ratio: f64,
    /// `Li(x) / phi(q)`.
    pub li_prediction: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct ModulusRow {
    pub q: u64,
    pub phi_q: u64,
    pub residues: Vec<ResidueRow>,
    pub max_deviation: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct BalanceReport {
    pub x: u64,
    pub pi_x: u64,
    pub li_x: f64,
    pub rows: Vec<ModulusRow>,
    /// Maximum over `q <= q_max`, `(a, q) = 1` of `|pi(x;q,a) phi(q) / pi(x) - 1|`.
    pub max_deviation: f64,
}

/// Prime counts in every reduced residue class mod `q`, for `2 <= q <= q_max`.
pub fn ap_balance_report(table: &PrimeTable, q_max: u64, x: u64) -> Result<BalanceReport> {
    if q_max < 2 {
        return Err(Error::InvalidArgument("q_max must be >= 2".into()));
    }
    let primes = table.up_to(x)?;
    let pi_x = primes.len() as u64;
    if pi_x == 0 {
        return Err(Error::Empty(format!("no primes up to {x}")));
    }
    let li_x = li(x as f64);
    let mut rows = Vec::new();
    for q in 2..=q_max {
        let mut counts = vec![0u64; q as usize];
        for &p in primes {
            counts[(p % q) as usize] += 1;
        }
        let phi_q = totient(q);
        let residues: Vec<ResidueRow> = (1..q)
            .filter(|a| a.gcd(&q) == 1)
            .map(|a| ResidueRow {
                a,
                count: counts[a as usize],
                ratio: counts[a as usize] as f64 * phi_q as f64 / pi_x as f64,
                li_prediction: li_x / phi_q as f64,
            })
            .collect();
        let max_deviation = residues.iter().map(|r| (r.ratio - 1.0).abs()).fold(0.0, f64::max);
        rows.push(ModulusRow {
            q,
            phi_q,
            residues,
            max_deviation,
        });
    }
    let max_deviation = rows.iter().map(|r| r.max_deviation).fold(0.0, f64::max);
    Ok(BalanceReport {
        x,
        pi_x,
        li_x,
        rows,
        max_deviation,
    })
}
