//! Exact checks of Vaughan's identity and Abel summation.

use num_complex::Complex64;
use serde::Serialize;

use super::arith::{arith_tables, ArithTables};
use crate::error::{Error, Result};
use crate::parallel::ComplexAccumulator;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct VaughanTerms {
    pub t1: Complex64,
    pub t2: Complex64,
    pub t3: Complex64,
    /// `sum_{v < n <= X} Lambda(n) g(n)`.
    pub lhs: Complex64,
}

impl VaughanTerms {
    pub fn rhs(&self) -> Complex64 {
        self.t1 - self.t2 - self.t3
    }

    /// `|lhs - (t1 - t2 - t3)|`.
    pub fn residual(&self) -> f64 {
        (self.lhs - self.rhs()).norm()
    }

    /// Residual relative to `max(1, |lhs|, |t1|, |t2|, |t3|)`.
    pub fn relative_residual(&self) -> f64 {
        let scale = [self.lhs, self.t1, self.t2, self.t3]
            .iter()
            .map(|z| z.norm())
            .fold(1.0, f64::max);
        self.residual() / scale
    }
}

/// Evaluate the three sums of Vaughan's identity by direct summation.
///
/// ```text
/// T1 = sum_{d <= u} sum_{m <= X/d} mu(d) log(m) g(dm)
/// T2 = sum_{m <= uv} sum_{r <= X/m} a(m) g(mr)
/// T3 = sum_{m > u} sum_{v < n <= X/m} b(m) Lambda(n) g(mn)
/// ```
///
/// with `a(m) = sum_{d <= u, n <= v, dn = m} mu(d) Lambda(n)` and
/// `b(m) = sum_{d <= u, d | m} mu(d)`.
pub fn vaughan_decompose<G>(g: G, x: u64, u: u64, v: u64) -> Result<VaughanTerms>
where
    G: Fn(u64) -> Complex64,
{
    if u == 0 || v == 0 || x < v {
        return Err(Error::InvalidArgument(format!(
            "need u, v >= 1 and X >= v (got X={x}, u={u}, v={v})"
        )));
    }
    let tables = arith_tables(x.max(u * v).max(2))?;
    Ok(vaughan_with_tables(&g, x, u, v, &tables))
}

fn vaughan_with_tables<G>(g: &G, x: u64, u: u64, v: u64, t: &ArithTables) -> VaughanTerms
where
    G: Fn(u64) -> Complex64,
{
    let mut lhs = ComplexAccumulator::new();
    for n in (v + 1)..=x {
        let l = t.lambda(n);
        if l != 0.0 {
            lhs.push(g(n) * l);
        }
    }

    let mut t1 = ComplexAccumulator::new();
    for d in 1..=u.min(x) {
        let mu = t.mobius(d);
        if mu == 0 {
            continue;
        }
        for m in 2..=x / d {
            t1.push(g(d * m) * (mu as f64 * (m as f64).ln()));
        }
    }

    let uv = u * v;
    let mut a = vec![0.0f64; uv as usize + 1];
    for d in 1..=u {
        let mu = t.mobius(d);
        if mu == 0 {
            continue;
        }
        for n in 1..=v {
            a[(d * n) as usize] += mu as f64 * t.lambda(n);
        }
    }
    let mut t2 = ComplexAccumulator::new();
    for m in 1..=uv.min(x) {
        let am = a[m as usize];
        if am == 0.0 {
            continue;
        }
        for r in 1..=x / m {
            t2.push(g(m * r) * am);
        }
    }

    // b(m) for u < m <= X/(v+1), sieved from the squarefree d <= u
    let m_max = x / (v + 1);
    let mut t3 = ComplexAccumulator::new();
    if m_max > u {
        let mut b = vec![0i64; (m_max + 1) as usize];
        for d in 1..=u {
            let mu = t.mobius(d) as i64;
            if mu == 0 {
                continue;
            }
            let mut m = d;
            while m <= m_max {
                b[m as usize] += mu;
                m += d;
            }
        }
        for m in (u + 1)..=m_max {
            let bm = b[m as usize];
            if bm == 0 {
                continue;
            }
            for n in (v + 1)..=x / m {
                let l = t.lambda(n);
                if l != 0.0 {
                    t3.push(g(m * n) * (bm as f64 * l));
                }
            }
        }
    }

    VaughanTerms {
        t1: t1.value(),
        t2: t2.value(),
        t3: t3.value(),
        lhs: lhs.value(),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct AbelCheck {
    pub lhs: Complex64,
    pub rhs: Complex64,
    pub diff: f64,
}

/// Both sides of Abel summation over `n = X1..=X2`, where `a[i]` and `b[i]`
/// hold `a_{X1+i}` and `b_{X1+i}`:
///
/// ```text
/// sum a_n b_n = sum_{n<X2} (a_n - a_{n+1}) B(n) + a_{X2} B(X2),  B(n) = sum_{m=X1}^{n} b_m
/// ```
pub fn partial_summation_check(a: &[Complex64], b: &[Complex64]) -> Result<AbelCheck> {
    if a.len() != b.len() {
        return Err(Error::Dimension(format!("a has {} terms, b has {}", a.len(), b.len())));
    }
    if a.len() < 2 {
        return Err(Error::InvalidArgument("need X1 < X2".into()));
    }
    let mut lhs = ComplexAccumulator::new();
    let mut rhs = ComplexAccumulator::new();
    let mut partial = ComplexAccumulator::new();
    let last = a.len() - 1;
    for i in 0..=last {
        lhs.push(a[i] * b[i]);
        partial.push(b[i]);
        let big_b = partial.value();
        if i < last {
            rhs.push((a[i] - a[i + 1]) * big_b);
        } else {
            rhs.push(a[i] * big_b);
        }
    }
    let (lhs, rhs) = (lhs.value(), rhs.value());
    Ok(AbelCheck {
        lhs,
        rhs,
        diff: (lhs - rhs).norm(),
    })
}

/// The error term `R*A + R*sum_{n<X2} |a_n - a_{n+1}|` of the approximate
/// form, with `A = max |a_n|` and `r_bound` a bound on the remainder `|R(n)|`.
/// Reported only; no constant is asserted.
pub fn abel_error_bound(a: &[Complex64], r_bound: f64) -> f64 {
    let amax = a.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let variation: f64 = a.windows(2).map(|w| (w[0] - w[1]).norm()).sum();
    r_bound * amax + r_bound * variation
}
