use std::fmt;
use std::str::FromStr;

use num_integer::Integer;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hardy::HardyExpr;
use crate::parallel::chunked;
use crate::primes::PrimeTable;

/// Index set along which a sequence is sampled.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Domain {
    /// `n = 1, 2, 3, ...`
    Integers,
    /// `p = 2, 3, 5, ...`
    Primes,
    /// Primes `p = residue mod modulus`.
    PrimesInAp { modulus: u64, residue: u64 },
}

impl Domain {
    pub fn primes_in_ap(modulus: u64, residue: i64) -> Result<Self> {
        if modulus == 0 {
            return Err(Error::InvalidArgument("modulus must be >= 1".into()));
        }
        let r = residue.rem_euclid(modulus as i64) as u64;
        let g = r.gcd(&modulus);
        if g != 1 {
            return Err(Error::NotCoprime {
                a: residue,
                q: modulus,
                gcd: g,
            });
        }
        Ok(Self::PrimesInAp { modulus, residue: r })
    }

    pub fn needs_primes(&self) -> bool {
        !matches!(self, Self::Integers)
    }

    /// The first `n` indices of the domain.
    pub fn first(&self, n: usize, table: Option<&PrimeTable>) -> Result<Vec<u64>> {
        let table = || {
            table.ok_or_else(|| Error::InvalidArgument(format!("domain {self} needs a prime table")))
        };
        match *self {
            Self::Integers => Ok((1..=n as u64).collect()),
            Self::Primes => Ok(table()?.first(n)?.to_vec()),
            Self::PrimesInAp { modulus, residue } => {
                let t = table()?;
                let out: Vec<u64> = t
                    .primes()
                    .iter()
                    .copied()
                    .filter(|p| p % modulus == residue)
                    .take(n)
                    .collect();
                if out.len() < n {
                    return Err(Error::TableTooSmall {
                        needed: format!("{n} primes = {residue} mod {modulus}"),
                        available: format!("{} below {}", out.len(), t.limit()),
                    });
                }
                Ok(out)
            }
        }
    }
}

impl fmt::Display for Domain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Integers => f.write_str("integers"),
            Self::Primes => f.write_str("primes"),
            Self::PrimesInAp { modulus, residue } => write!(f, "ap:{modulus}:{residue}"),
        }
    }
}

/// `integers`, `primes`, or `ap:MODULUS:RESIDUE`.
impl FromStr for Domain {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "integers" => Ok(Self::Integers),
            "primes" => Ok(Self::Primes),
            _ => {
                let parts: Vec<&str> = s.split(':').collect();
                let bad = || Error::InvalidArgument(format!("unknown domain {s:?}; use integers, primes or ap:Q:T"));
                if parts.len() != 3 || parts[0] != "ap" {
                    return Err(bad());
                }
                let q = parts[1].parse().map_err(|_| bad())?;
                let t = parts[2].parse().map_err(|_| bad())?;
                Self::primes_in_ap(q, t)
            }
        }
    }
}

/// Fractional parts `{q f(n)}` over the first `N` indices of a domain.
#[derive(Clone, Debug, PartialEq)]
pub struct FracStream {
    pub args: Vec<u64>,
    pub points: Vec<f64>,
    /// Values that fell within 1e-9 of an integer without being one.
    pub boundary_events: u64,
}

/// Evaluate `{q expr(n)}` in compensated precision for the first `n` indices.
pub fn fractional_parts(
    expr: &HardyExpr,
    q: i64,
    domain: Domain,
    n: usize,
    table: Option<&PrimeTable>,
    chunk: usize,
) -> Result<FracStream> {
    if n == 0 {
        return Err(Error::Empty("need N >= 1 points".into()));
    }
    let args = domain.first(n, table)?;
    let parts = chunked(args.len(), chunk, |range| {
        let mut pts = Vec::with_capacity(range.len());
        let mut events = 0u64;
        for &a in &args[range] {
            let v = expr.frac_scaled(a as f64, q)?;
            events += v.boundary as u64;
            pts.push(v.frac);
        }
        Ok((pts, events))
    })?;
    let mut points = Vec::with_capacity(args.len());
    let mut boundary_events = 0;
    for (pts, ev) in parts {
        points.extend(pts);
        boundary_events += ev;
    }
    Ok(FracStream {
        args,
        points,
        boundary_events,
    })
}
