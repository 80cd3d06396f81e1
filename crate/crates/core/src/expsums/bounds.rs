use std::collections::BTreeMap;

use num_complex::Complex64;
use serde::Serialize;

use super::sums::{weyl_sum_integers, weyl_sum_points, SumConfig};
use crate::discrepancy::{extreme_discrepancy, star_discrepancy, EXTREME_CAP};
use crate::error::{Error, Result};
use crate::hardy::HardyExpr;
use crate::parallel::ComplexAccumulator;

/// Grid density used to estimate derivative ranges and check monotonicity.
pub const GRID_POINTS: usize = 1024;

/// Explicit constants standing in for the implied constants of the estimates.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct BoundConstants {
    /// `D <= C (1/Q + sum_{q<=Q} |S_q| / (qN))`.
    pub erdos_turan: f64,
    /// Multiplier of the composite (iterated van der Corput) bound.
    pub composite: f64,
    /// Kusmin-Landau: `|S| <= c / lambda + 1`.
    pub kusmin_landau: f64,
}

impl Default for BoundConstants {
    fn default() -> Self {
        Self {
            erdos_turan: 4.0,
            composite: 10.0,
            kusmin_landau: 2.0 / std::f64::consts::PI,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BoundReport {
    pub actual: f64,
    pub bound: f64,
    /// `actual / bound`; 0 when the bound is infinite.
    pub ratio: f64,
    pub holds: bool,
    /// Whether the hypotheses of the estimate were verified on the input.
    pub valid: bool,
    /// Intermediate quantities (lambda, alpha, ...), keyed by name.
    pub details: BTreeMap<String, f64>,
    pub note: Option<String>,
}

impl BoundReport {
    fn new(actual: f64, bound: f64, valid: bool) -> Self {
        let ratio = if bound.is_infinite() { 0.0 } else { actual / bound };
        Self {
            actual,
            bound,
            ratio,
            holds: actual <= bound,
            valid,
            details: BTreeMap::new(),
            note: None,
        }
    }

    fn detail(mut self, key: &str, v: f64) -> Self {
        self.details.insert(key.to_string(), v);
        self
    }

    fn note(mut self, msg: impl Into<String>) -> Self {
        self.note = Some(msg.into());
        self
    }
}

fn grid(lo: f64, hi: f64) -> impl Iterator<Item = f64> {
    let step = (hi - lo) / (GRID_POINTS - 1) as f64;
    (0..GRID_POINTS).map(move |i| if i + 1 == GRID_POINTS { hi } else { lo + step * i as f64 })
}

fn is_monotone(values: &[f64]) -> bool {
    values.windows(2).all(|w| w[1] >= w[0]) || values.windows(2).all(|w| w[1] <= w[0])
}

fn dist_to_int(v: f64) -> f64 {
    (v - v.round()).abs()
}

/// Kusmin-Landau: if `q f'` is monotone on `[a, b]` and stays at distance at
/// least `lambda` from the integers, then `|sum e(q f(n))| <= 2/(pi lambda) + 1`.
///
/// `lambda` is the smaller distance at the two endpoints. The hypotheses are
/// checked on a 1024-point grid; failures mark the report invalid.
pub fn kusmin_landau_check(
    phase: &HardyExpr,
    q: i64,
    a: u64,
    b: u64,
    consts: &BoundConstants,
    cfg: &SumConfig,
) -> Result<BoundReport> {
    let actual = weyl_sum_integers(phase, q, a, b, cfg)?.sum.norm();
    let d1 = phase.differentiate();
    let g = |x: f64| d1.evaluate_f64(x).map(|v| v * q as f64);
    let values = grid(a as f64, b as f64).map(g).collect::<Result<Vec<_>>>()?;
    let monotone = is_monotone(&values);
    let cell = values[0].floor();
    let one_cell = values.iter().all(|v| v.floor() == cell && dist_to_int(*v) > 0.0);
    let lambda = dist_to_int(values[0]).min(dist_to_int(values[GRID_POINTS - 1]));
    let valid = monotone && one_cell && lambda > 0.0;
    let bound = if lambda > 0.0 {
        consts.kusmin_landau / lambda + 1.0
    } else {
        f64::INFINITY
    };
    let mut rep = BoundReport::new(actual, bound, valid)
        .detail("lambda", lambda)
        .detail("monotone", monotone as u8 as f64);
    if !monotone {
        rep = rep.note("derivative not monotone on the interval");
    } else if !one_cell {
        rep = rep.note("derivative crosses an integer on the interval");
    }
    Ok(rep)
}

/// Weyl-van der Corput:
///
/// ```text
/// |sum_I xi(n)|^2 <= (|I| + H)/H * sum_{|h| <= H} (1 - |h|/H) sum_{n, n+h in I} xi(n) conj(xi(n+h))
/// ```
///
/// The right side is real because the `h` and `-h` inner sums are conjugate;
/// it is evaluated with its signs, not termwise absolute values.
pub fn vdc_inequality_check(xi: &[Complex64], h: usize) -> Result<BoundReport> {
    if xi.is_empty() {
        return Err(Error::Empty("van der Corput needs |I| >= 1".into()));
    }
    if h == 0 {
        return Err(Error::InvalidArgument("H must be >= 1".into()));
    }
    if xi.iter().any(|z| !(z.norm() <= 1.0 + 1e-12)) {
        return Err(Error::InvalidArgument("xi must have modulus <= 1".into()));
    }
    let n = xi.len();
    let mut total = ComplexAccumulator::new();
    for z in xi {
        total.push(*z);
    }
    let actual = total.value().norm_sqr();
    let mut inner = ComplexAccumulator::new();
    for shift in 0..=h.min(n - 1) {
        let mut c = ComplexAccumulator::new();
        for i in 0..n - shift {
            c.push(xi[i] * xi[i + shift].conj());
        }
        let w = 1.0 - shift as f64 / h as f64;
        let mult = if shift == 0 { 1.0 } else { 2.0 };
        inner.push(Complex64::new(mult * w * c.value().re, 0.0));
    }
    let bound = (n + h) as f64 / h as f64 * inner.value().re;
    Ok(BoundReport::new(actual, bound, true))
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize)]
pub struct CompositeOverrides {
    pub lambda: Option<f64>,
    pub alpha: Option<f64>,
}

/// Iterated van der Corput bound on `I = (x1, x1 + x]` with `x <= x1` and `K = 2^k`:
///
/// ```text
/// |S| <= C X [(alpha lambda)^(1/(2K-2)) + (lambda X^(k+1))^(-1/K) (log X)^(k/K) + (alpha log^k X / X)^(1/K)]
/// ```
///
/// where `lambda <= |q f^(k+1)| <= alpha lambda` on `I`. The implied constant of
/// the estimate is unknown, so `holds` is advisory and `ratio` is the output.
pub fn composite_bound_eval(
    phase: &HardyExpr,
    q: i64,
    k: u32,
    x1: u64,
    x: u64,
    overrides: CompositeOverrides,
    consts: &BoundConstants,
    cfg: &SumConfig,
) -> Result<BoundReport> {
    if k == 0 || k > 8 {
        return Err(Error::InvalidArgument(format!("k = {k} outside 1..=8")));
    }
    if x == 0 || x1 == 0 || x > x1 {
        return Err(Error::InvalidArgument(format!(
            "interval ({x1}, {x1}+{x}] is not inside ({x1}, 2*{x1}]"
        )));
    }
    let actual = weyl_sum_integers(phase, q, x1 + 1, x1 + x, cfg)?.sum.norm();
    let dk = phase.nth_derivative(k + 1);
    let lo = (x1 + 1) as f64;
    let hi = (x1 + x) as f64;
    let values = grid(lo, hi)
        .map(|t| dk.evaluate_f64(t).map(|v| v * q as f64))
        .collect::<Result<Vec<_>>>()?;
    let monotone = is_monotone(&values);
    let min_abs = values.iter().map(|v| v.abs()).fold(f64::INFINITY, f64::min);
    let max_abs = values.iter().map(|v| v.abs()).fold(0.0, f64::max);
    let lambda = overrides.lambda.unwrap_or(min_abs);
    let alpha = overrides
        .alpha
        .unwrap_or(if lambda > 0.0 { max_abs / lambda } else { f64::INFINITY });
    let consistent = lambda <= min_abs * (1.0 + 1e-9) && alpha * lambda >= max_abs * (1.0 - 1e-9);
    let valid = monotone && lambda > 0.0 && alpha.is_finite() && consistent;

    let big_k = (1u64 << k) as f64;
    let xf = x as f64;
    let lx = xf.ln();
    let bound = if lambda > 0.0 && alpha.is_finite() {
        let t1 = (alpha * lambda).powf(1.0 / (2.0 * big_k - 2.0));
        let t2 = (lambda * xf.powi(k as i32 + 1)).powf(-1.0 / big_k) * lx.powf(k as f64 / big_k);
        let t3 = (alpha * lx.powi(k as i32) / xf).powf(1.0 / big_k);
        consts.composite * xf * (t1 + t2 + t3)
    } else {
        f64::INFINITY
    };
    let mut rep = BoundReport::new(actual, bound, valid)
        .detail("lambda", lambda)
        .detail("alpha", alpha)
        .detail("K", big_k)
        .detail("normalized_actual", actual / xf);
    rep = if !monotone {
        rep.note("f^(k+1) not monotone on the interval")
    } else if lambda <= 0.0 {
        rep.note("lambda = 0: derivative vanishes on the interval")
    } else if !consistent {
        rep.note("supplied lambda/alpha inconsistent with sampled derivative")
    } else {
        rep.note("implied constant unknown; holds is advisory")
    };
    Ok(rep)
}

/// Erdos-Turan: `D <= C (1/Q + (1/N) sum_{q <= Q} |sum_n e(q x_n)| / q)`.
///
/// `actual` is the exact extreme discrepancy for `N <= 10^4` and the upper
/// sandwich value `2 D*` beyond, which keeps `holds` conservative.
pub fn erdos_turan_bound(points: &[f64], q_max: u64, consts: &BoundConstants, chunk: usize) -> Result<BoundReport> {
    if q_max == 0 {
        return Err(Error::InvalidArgument("Q must be >= 1".into()));
    }
    let (actual, exact) = if points.len() <= EXTREME_CAP {
        (extreme_discrepancy(points)?, true)
    } else {
        (2.0 * star_discrepancy(points)?, false)
    };
    let n = points.len() as f64;
    let mut acc = 0.0;
    for q in 1..=q_max {
        acc += weyl_sum_points(points, q as i64, chunk)?.sum.norm() / q as f64;
    }
    let bound = consts.erdos_turan * (1.0 / q_max as f64 + acc / n);
    let rep = BoundReport::new(actual, bound, true).detail("Q", q_max as f64);
    Ok(if exact {
        rep
    } else {
        rep.note("N above the exact cap; actual is the upper sandwich 2*D*")
    })
}
