//! Numeric verification of the differential inequalities satisfied by
//! slowly growing Hardy-field functions.
//!
//! Each check is a ratio `R(x)` that the theory bounds between reference
//! envelopes `lower(x) << R(x) << upper(x)` with unspecified constants. A
//! sample passes when `R(x) / lower(x) >= window.lo` and `R(x) / upper(x) <= window.hi`.

use serde::Serialize;

use super::expr::HardyExpr;
use super::growth::{classify_growth, growth_exponent, GrowthType};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Check {
    /// `|x f^(n+1) / f^(n)| >> 1/log^2 x`
    E0,
    /// `0 << f'(x) / f'(2x) << log x`
    E1,
    /// `1/(2 log x) << x f' / f << 1`
    E2,
    /// `1/log^2 x << |x f^(j+1)/f^(j) + j| << 1`
    E3,
    /// `1/log^2 x << |x f^(j+1)/f^(j)| << 1`
    E4,
    /// `|j + x f^(j+1)/f^(j)| ~ 1`
    E5,
    /// `x^(beta-j-eps) << |f^(j)| << x^(beta-j+eps)`
    E6,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ConstantWindow {
    pub lo: f64,
    pub hi: f64,
    /// The `eps` slack in the power-law check.
    pub epsilon: f64,
}

impl Default for ConstantWindow {
    fn default() -> Self {
        Self {
            lo: 1.0 / 64.0,
            hi: 64.0,
            epsilon: 0.1,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct InequalityRow {
    pub x: f64,
    pub check: Check,
    pub j: u32,
    pub value: f64,
    pub lower: f64,
    pub upper: f64,
    pub within: bool,
    /// A derivative vanished at this sample; the ratio is undefined.
    pub flagged: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct InequalityReport {
    pub expr: String,
    pub window: ConstantWindow,
    pub rows: Vec<InequalityRow>,
}

impl InequalityReport {
    pub fn all_within(&self) -> bool {
        self.rows.iter().all(|r| r.flagged || r.within)
    }

    pub fn flagged(&self) -> usize {
        self.rows.iter().filter(|r| r.flagged).count()
    }
}

struct Ctx<'a> {
    derivs: &'a [HardyExpr],
    window: ConstantWindow,
    rows: Vec<InequalityRow>,
}

impl Ctx<'_> {
    fn d(&self, j: u32, x: f64) -> Result<f64> {
        self.derivs[j as usize].evaluate_f64(x)
    }

    fn push(&mut self, x: f64, check: Check, j: u32, value: Option<f64>, lower: f64, upper: f64) {
        let row = match value {
            Some(v) if v.is_finite() => InequalityRow {
                x,
                check,
                j,
                value: v,
                lower,
                upper,
                within: v >= self.window.lo * lower && v <= self.window.hi * upper,
                flagged: false,
            },
            _ => InequalityRow {
                x,
                check,
                j,
                value: f64::NAN,
                lower,
                upper,
                within: false,
                flagged: true,
            },
        };
        self.rows.push(row);
    }

    /// `x f^(j+1)(x) / f^(j)(x)`, or None when `f^(j)(x) = 0`.
    fn log_ratio(&self, j: u32, x: f64) -> Result<Option<f64>> {
        let den = self.d(j, x)?;
        if den == 0.0 {
            return Ok(None);
        }
        Ok(Some(x * self.d(j + 1, x)? / den))
    }
}

/// Evaluate the applicable inequalities at every sample and every `j <= j_max`.
///
/// Type `x^{0+}` and `log^k` (k >= 2) functions get the slow-growth family
/// (e0, e1, e2, e3, e4); type `x^{l+}` with `l >= 1` gets (e0, e5, e6).
/// Functions tending to a constant or equal to an exact monomial have no
/// applicable checks and are rejected.
pub fn verify_differential_inequalities(
    expr: &HardyExpr,
    x_samples: &[f64],
    j_max: u32,
    window: ConstantWindow,
) -> Result<InequalityReport> {
    let class = classify_growth(expr)?;
    let slow = match class {
        GrowthType::TypeLPlus(0) | GrowthType::LogPower(2..) => true,
        GrowthType::TypeLPlus(_) => false,
        other => {
            return Err(Error::InvalidArgument(format!(
                "no differential inequalities apply to growth class {other:?}"
            )))
        }
    };
    let e = std::f64::consts::E;
    if x_samples.windows(2).any(|w| w[0] >= w[1]) || x_samples.iter().any(|&x| x <= e) {
        return Err(Error::InvalidArgument("samples must be increasing and > e".into()));
    }
    let j_max = j_max.max(1);
    let derivs: Vec<HardyExpr> = (0..=j_max + 1)
        .scan(expr.clone(), |cur, _| {
            let out = cur.clone();
            *cur = cur.differentiate();
            Some(out)
        })
        .collect();
    let beta = growth_exponent(expr)?;
    let mut ctx = Ctx {
        derivs: &derivs,
        window,
        rows: Vec::new(),
    };
    for &x in x_samples {
        let lx = x.ln();
        let inv_log2 = 1.0 / (lx * lx);
        for n in 0..=j_max {
            let r = ctx.log_ratio(n, x)?.map(f64::abs);
            ctx.push(x, Check::E0, n, r, inv_log2, f64::INFINITY);
        }
        if slow {
            let r = ctx.log_ratio(0, x)?;
            ctx.push(x, Check::E2, 0, r, 1.0 / (2.0 * lx), 1.0);
            let d2x = ctx.d(1, 2.0 * x)?;
            let r = (d2x != 0.0).then(|| ctx.d(1, x).map(|d| d / d2x)).transpose()?;
            ctx.push(x, Check::E1, 1, r, 1.0, lx);
            for j in 1..=j_max {
                let r = ctx.log_ratio(j, x)?;
                ctx.push(x, Check::E3, j, r.map(|v| (v + j as f64).abs()), inv_log2, 1.0);
                ctx.push(x, Check::E4, j, r.map(f64::abs), inv_log2, 1.0);
            }
        } else {
            for j in 0..=j_max {
                let r = ctx.log_ratio(j, x)?;
                ctx.push(x, Check::E5, j, r.map(|v| (v + j as f64).abs()), 1.0, 1.0);
                let v = ctx.d(j, x)?.abs() / x.powf(beta - j as f64);
                let v = (v != 0.0).then_some(v);
                ctx.push(
                    x,
                    Check::E6,
                    j,
                    v,
                    x.powf(-window.epsilon),
                    x.powf(window.epsilon),
                );
            }
        }
    }
    Ok(InequalityReport {
        expr: expr.to_string(),
        window,
        rows: ctx.rows,
    })
}
