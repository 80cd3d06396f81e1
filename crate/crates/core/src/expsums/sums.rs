use num_complex::Complex64;
use serde::Serialize;

use crate::circle;
use crate::error::{Error, Result};
use crate::hardy::{HardyExpr, Precision};
use crate::parallel::{sum_complex, DEFAULT_CHUNK};
use crate::primes::PrimeTable;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ExpSumResult {
    pub sum: Complex64,
    pub count: u64,
    /// `|sum| / count`, or 0 for an empty sum.
    pub normalized: f64,
}

impl ExpSumResult {
    pub fn new(sum: Complex64, count: u64) -> Self {
        let norm = sum.norm();
        // Each term has modulus one up to rounding.
        assert!(
            norm <= count as f64 * (1.0 + 1e-12) + 1e-12,
            "|sum| = {norm} exceeds term count {count}"
        );
        let normalized = if count == 0 {
            0.0
        } else {
            (norm / count as f64).min(1.0)
        };
        Self {
            sum,
            count,
            normalized,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct SumConfig {
    pub chunk_size: usize,
    /// Standard evaluation errors out above 2^45; compensated is the default.
    pub precision: Precision,
}

impl Default for SumConfig {
    fn default() -> Self {
        Self {
            chunk_size: DEFAULT_CHUNK,
            precision: Precision::Compensated,
        }
    }
}

/// `e(q * phase(n))`, reducing `q * phase(n)` mod 1 before the exponential.
fn term(phase: &HardyExpr, n: u64, q: i64, precision: Precision) -> Result<Complex64> {
    let r = match precision {
        Precision::Compensated => phase.phase(n as f64, q)?,
        Precision::Standard => {
            let v = phase.evaluate(n as f64, Precision::Standard)? * q as f64;
            v - v.round()
        }
    };
    Ok(circle(r))
}

fn check_q(q: i64) -> Result<()> {
    if q == 0 {
        return Err(Error::InvalidArgument("frequency q must be nonzero".into()));
    }
    Ok(())
}

/// `sum_{n=a}^{b} e(q * phase(n))`.
pub fn weyl_sum_integers(phase: &HardyExpr, q: i64, a: u64, b: u64, cfg: &SumConfig) -> Result<ExpSumResult> {
    check_q(q)?;
    if a < 1 || b < a {
        return Err(Error::InvalidArgument(format!("need 1 <= A <= B, got [{a}, {b}]")));
    }
    let len = (b - a + 1) as usize;
    let sum = sum_complex(len, cfg.chunk_size, |i| term(phase, a + i as u64, q, cfg.precision))?;
    Ok(ExpSumResult::new(sum, len as u64))
}

/// `sum_{p <= x} e(q * phase(p))`.
pub fn weyl_sum_primes(
    phase: &HardyExpr,
    q: i64,
    x: u64,
    table: &PrimeTable,
    cfg: &SumConfig,
) -> Result<ExpSumResult> {
    weyl_sum_primes_range(phase, q, 0, x, table, cfg)
}

/// `sum_{x0 < p <= x} e(q * phase(p))`.
pub fn weyl_sum_primes_range(
    phase: &HardyExpr,
    q: i64,
    x0: u64,
    x: u64,
    table: &PrimeTable,
    cfg: &SumConfig,
) -> Result<ExpSumResult> {
    check_q(q)?;
    if x0 > x {
        return Err(Error::InvalidArgument(format!("empty range ({x0}, {x}]")));
    }
    let all = table.up_to(x)?;
    let ps = &all[table.pi(x0) as usize..];
    weyl_sum_values(phase, q, ps, cfg)
}

/// `sum_{n in args} e(q * phase(n))` over an explicit argument list.
pub fn weyl_sum_values(phase: &HardyExpr, q: i64, args: &[u64], cfg: &SumConfig) -> Result<ExpSumResult> {
    check_q(q)?;
    let sum = sum_complex(args.len(), cfg.chunk_size, |i| term(phase, args[i], q, cfg.precision))?;
    Ok(ExpSumResult::new(sum, args.len() as u64))
}

/// `sum_i e(q * points[i])` for points already reduced mod 1.
pub fn weyl_sum_points(points: &[f64], q: i64, chunk: usize) -> Result<ExpSumResult> {
    let sum = sum_complex(points.len(), chunk, |i| {
        let v = points[i] * q as f64;
        Ok(circle(v - v.round()))
    })?;
    Ok(ExpSumResult::new(sum, points.len() as u64))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::primes::sieve;

    fn p(s: &str) -> HardyExpr {
        s.parse().unwrap()
    }

    #[test]
    fn full_period_cancels() {
        let r = weyl_sum_integers(&p("1/3*x"), 1, 1, 3, &SumConfig::default()).unwrap();
        assert!(r.sum.norm() < 1e-15);
        assert_eq!(r.count, 3);
    }

    #[test]
    fn integral_phase_sums_to_count() {
        let r = weyl_sum_integers(&p("1/2*x^2 + 1/2*x"), 1, 1, 500, &SumConfig::default()).unwrap();
        assert_eq!(r.sum, Complex64::new(500.0, 0.0));
        assert_eq!(r.normalized, 1.0);
    }

    #[test]
    fn linear_phase_closed_form() {
        let alpha = 2f64.sqrt();
        let n = 10_000u64;
        let r = weyl_sum_integers(&p("sqrt(2)*x"), 1, 1, n, &SumConfig::default()).unwrap();
        let exact = (std::f64::consts::PI * n as f64 * alpha).sin().abs() / (std::f64::consts::PI * alpha).sin().abs();
        assert!((r.sum.norm() - exact).abs() / exact < 1e-9);
    }

    #[test]
    fn prime_sums() {
        let t = sieve(10_000).unwrap();
        let cfg = SumConfig::default();
        let r = weyl_sum_primes(&p("1/2*x"), 2, 10_000, &t, &cfg).unwrap();
        assert_eq!(r.sum, Complex64::new(t.pi(10_000) as f64, 0.0));
        let whole = weyl_sum_primes(&p("x^(3/2)"), 1, 10_000, &t, &cfg).unwrap();
        let a = weyl_sum_primes_range(&p("x^(3/2)"), 1, 0, 4000, &t, &cfg).unwrap();
        let b = weyl_sum_primes_range(&p("x^(3/2)"), 1, 4000, 10_000, &t, &cfg).unwrap();
        assert!((whole.sum - a.sum - b.sum).norm() < 1e-10);
        assert_eq!(a.count + b.count, whole.count);
        assert!(weyl_sum_primes(&p("x"), 1, 10_001, &t, &cfg).is_err());
        assert!(weyl_sum_primes(&p("x"), 0, 100, &t, &cfg).is_err());
    }

    #[test]
    fn standard_precision_rejects_large_values() {
        let cfg = SumConfig {
            precision: Precision::Standard,
            ..SumConfig::default()
        };
        assert!(weyl_sum_integers(&p("x^3"), 1, 100_000, 100_001, &cfg).is_err());
        assert!(weyl_sum_integers(&p("x^3"), 1, 100_000, 100_001, &SumConfig::default()).is_ok());
    }

    #[test]
    fn overflow_rejected() {
        assert!(weyl_sum_integers(&p("x^10"), 1, 1_000_000_000, 1_000_000_001, &SumConfig::default()).is_err());
    }

    #[test]
    fn chunking_is_deterministic() {
        let e = p("x^(3/2) + sqrt(2)*x^2");
        let a = weyl_sum_integers(&e, 1, 1, 50_000, &SumConfig::default()).unwrap();
        let b = weyl_sum_integers(&e, 1, 1, 50_000, &SumConfig::default()).unwrap();
        assert_eq!(a.sum, b.sum);
    }
}
