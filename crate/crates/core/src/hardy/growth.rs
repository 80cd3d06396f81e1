//! Growth classes and the decision procedures built on leading terms.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_rational::{BigRational, Rational64};
use num_traits::{Signed, ToPrimitive, Zero};

use super::coefficient::{Coefficient, Irrational};
use super::expr::HardyExpr;
use crate::dd::DoubleDouble;
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub enum GrowthType {
    /// `f -> limit`, a finite constant (possibly zero).
    TendsToConstant(f64),
    /// `f ~ c (log x)^k`, `k >= 1`.
    LogPower(u32),
    /// `x^l / f -> 0` and `f / x^(l+1) -> 0`.
    TypeLPlus(u32),
    /// `f / x^d` tends to the nonzero `leading`.
    ExactMonomial { degree: u32, leading: Coefficient },
}

/// Which real or integer coefficient vectors are allowed in a combination.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CombinationDomain {
    Integers,
    Reals,
}

fn zero_rejected() -> Error {
    Error::InvalidArgument("the zero function has no growth class".into())
}

pub fn classify_growth(expr: &HardyExpr) -> Result<GrowthType> {
    let lead = expr.leading().ok_or_else(zero_rejected)?;
    let theta = lead.theta;
    let k = lead.logpow;
    Ok(if theta.is_negative() {
        GrowthType::TendsToConstant(0.0)
    } else if theta.is_zero() {
        if k == 0 {
            GrowthType::TendsToConstant(lead.coeff.value())
        } else {
            GrowthType::LogPower(k)
        }
    } else if theta.is_integer() {
        let d = theta.to_integer() as u32;
        if k == 0 {
            GrowthType::ExactMonomial {
                degree: d,
                leading: lead.coeff.clone(),
            }
        } else {
            GrowthType::TypeLPlus(d)
        }
    } else {
        GrowthType::TypeLPlus(theta.floor().to_integer() as u32)
    })
}

/// `lim log|f| / log x`: the exponent of the leading term.
pub fn growth_exponent(expr: &HardyExpr) -> Result<f64> {
    let lead = expr.leading().ok_or_else(zero_rejected)?;
    Ok(lead.theta.to_f64().unwrap_or(f64::NAN))
}

/// Membership of a leading signature in the window defining **H**: type
/// `x^{l+}` with `l >= 1`, or `log x << f << x`.
pub fn signature_in_bold_h(theta: Rational64, logpow: u32) -> bool {
    let zero = Rational64::zero();
    let one = Rational64::from_integer(1);
    if theta > zero && theta < one {
        return true;
    }
    if theta.is_zero() {
        return logpow >= 2;
    }
    theta >= one && (!theta.is_integer() || logpow > 0)
}

pub fn is_in_bold_h(expr: &HardyExpr) -> Result<bool> {
    let lead = expr.leading().ok_or_else(zero_rejected)?;
    Ok(signature_in_bold_h(lead.theta, lead.logpow))
}

/// Whether `(f - P) / log x -> +-inf` for every rational polynomial `P`.
///
/// Split `f` into its polynomial part (integer exponent, no log) and the rest
/// `g`. An irrational non-constant polynomial coefficient cannot be cancelled
/// by any rational `P`. Otherwise the best `P` removes the polynomial part and
/// the answer depends on whether `g` outgrows `log x`.
pub fn boshernitzan_condition(expr: &HardyExpr) -> Result<bool> {
    if !expr.is_subpolynomial_input() {
        return Err(Error::InvalidArgument(
            "condition is defined for expressions with non-negative exponents".into(),
        ));
    }
    let mut residual = Vec::new();
    for t in expr.terms() {
        let poly = t.theta.is_integer() && t.logpow == 0;
        if poly {
            if !t.theta.is_zero() && !t.coeff.is_rational() {
                return Ok(true);
            }
        } else {
            residual.push(t);
        }
    }
    Ok(match residual.first() {
        Some(lead) => lead.theta.is_positive() || (lead.theta.is_zero() && lead.logpow >= 2),
        None => false,
    })
}

/// Decide whether every nonzero combination `sum b_i f_i` stays in **H**.
///
/// With signatures ordered by decreasing growth, the leading surviving
/// signature of a combination is the first column it does not annihilate. Such
/// a combination exists for column `j` exactly when the rank of the coefficient
/// matrix grows when column `j` is appended. The family passes when the full
/// matrix has rank `k` (no combination vanishes) and every rank-raising column
/// sits in the **H** window.
///
/// Over the integers each coefficient is expanded along its rational and named
/// irrational components, which are independent over Q, and the rank is exact.
/// Over the reals a column is a single real vector: exact when all entries are
/// rational, otherwise computed in double-double with a relative cutoff of 1e-24.
pub fn family_combination_check(family: &[HardyExpr], domain: CombinationDomain) -> Result<bool> {
    if family.is_empty() {
        return Err(Error::Empty("family".into()));
    }
    if family.iter().any(HardyExpr::is_zero) {
        return Err(zero_rejected());
    }
    let k = family.len();
    let mut sigs: Vec<(Rational64, u32)> = family
        .iter()
        .flat_map(|e| e.terms().iter().map(|t| t.signature()))
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    sigs.sort_by(|a, b| b.0.cmp(&a.0).then(b.1.cmp(&a.1)));

    let coeff_at = |i: usize, sig: &(Rational64, u32)| -> Coefficient {
        family[i]
            .terms()
            .iter()
            .find(|t| &t.signature() == sig)
            .map(|t| t.coeff.clone())
            .unwrap_or_else(Coefficient::zero)
    };

    let all_rational = family
        .iter()
        .all(|e| e.terms().iter().all(|t| t.coeff.is_rational()));

    let mut exact = ExactBasis::new(k);
    let mut numeric = NumericBasis::new(k);
    for sig in &sigs {
        let column: Vec<Coefficient> = (0..k).map(|i| coeff_at(i, sig)).collect();
        let raised = match domain {
            CombinationDomain::Integers => {
                let mut comps: BTreeSet<Option<Irrational>> = BTreeSet::new();
                for c in &column {
                    if !c.rational_part().is_zero() {
                        comps.insert(None);
                    }
                    comps.extend(c.irrational_parts().keys().cloned().map(Some));
                }
                let mut raised = false;
                for comp in comps {
                    let v: Vec<Rational64> = column
                        .iter()
                        .map(|c| match &comp {
                            None => c.rational_part(),
                            Some(s) => c.irrational_parts().get(s).copied().unwrap_or_default(),
                        })
                        .collect();
                    raised |= exact.insert(&v);
                }
                raised
            }
            CombinationDomain::Reals if all_rational => {
                let v: Vec<Rational64> = column.iter().map(|c| c.rational_part()).collect();
                exact.insert(&v)
            }
            CombinationDomain::Reals => {
                let v: Vec<DoubleDouble> = column.iter().map(|c| c.value_dd()).collect();
                numeric.insert(v)
            }
        };
        if raised && !signature_in_bold_h(sig.0, sig.1) {
            return Ok(false);
        }
    }
    let rank = match domain {
        CombinationDomain::Reals if !all_rational => numeric.rank(),
        _ => exact.rank(),
    };
    Ok(rank == k)
}

/// Row-echelon basis over Q of the span of inserted vectors.
struct ExactBasis {
    dim: usize,
    rows: Vec<(usize, Vec<BigRational>)>,
}

impl ExactBasis {
    fn new(dim: usize) -> Self {
        Self { dim, rows: Vec::new() }
    }

    fn rank(&self) -> usize {
        self.rows.len()
    }

    /// Insert `v`; true if it was independent of the current span.
    fn insert(&mut self, v: &[Rational64]) -> bool {
        let mut v: Vec<BigRational> = v
            .iter()
            .map(|r| BigRational::new(BigInt::from(*r.numer()), BigInt::from(*r.denom())))
            .collect();
        debug_assert_eq!(v.len(), self.dim);
        for (pivot, row) in &self.rows {
            if !v[*pivot].is_zero() {
                let f = v[*pivot].clone() / row[*pivot].clone();
                for (a, b) in v.iter_mut().zip(row) {
                    *a -= f.clone() * b;
                }
            }
        }
        match v.iter().position(|a| !a.is_zero()) {
            Some(p) => {
                self.rows.push((p, v));
                true
            }
            None => false,
        }
    }
}

/// Modified Gram-Schmidt in double-double, for real columns with irrational entries.
struct NumericBasis {
    dim: usize,
    rows: Vec<Vec<DoubleDouble>>,
}

impl NumericBasis {
    fn new(dim: usize) -> Self {
        Self { dim, rows: Vec::new() }
    }

    fn rank(&self) -> usize {
        self.rows.len()
    }

    fn norm(v: &[DoubleDouble]) -> DoubleDouble {
        v.iter().fold(DoubleDouble::ZERO, |acc, a| acc + a.sqr()).sqrt()
    }

    fn insert(&mut self, mut v: Vec<DoubleDouble>) -> bool {
        debug_assert_eq!(v.len(), self.dim);
        let scale = Self::norm(&v).to_f64();
        if scale == 0.0 {
            return false;
        }
        for _ in 0..2 {
            for row in &self.rows {
                let dot = v.iter().zip(row).fold(DoubleDouble::ZERO, |acc, (a, b)| acc + *a * *b);
                for (a, b) in v.iter_mut().zip(row) {
                    *a = *a - dot * *b;
                }
            }
        }
        let n = Self::norm(&v);
        if n.to_f64() <= 1e-24 * scale {
            return false;
        }
        let inv = n.recip();
        self.rows.push(v.into_iter().map(|a| a * inv).collect());
        true
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str) -> HardyExpr {
        s.parse().unwrap()
    }

    #[test]
    fn classify_examples() {
        assert_eq!(classify_growth(&p("x^(3/2)")).unwrap(), GrowthType::TypeLPlus(1));
        assert_eq!(classify_growth(&p("x^2*log^1")).unwrap(), GrowthType::TypeLPlus(2));
        assert_eq!(
            classify_growth(&p("5*x^3")).unwrap(),
            GrowthType::ExactMonomial {
                degree: 3,
                leading: Coefficient::integer(5)
            }
        );
        assert_eq!(classify_growth(&p("x^(1/2)")).unwrap(), GrowthType::TypeLPlus(0));
        assert_eq!(classify_growth(&p("log^2 + 3")).unwrap(), GrowthType::LogPower(2));
        assert_eq!(classify_growth(&p("7")).unwrap(), GrowthType::TendsToConstant(7.0));
        assert_eq!(classify_growth(&p("x^(-1)")).unwrap(), GrowthType::TendsToConstant(0.0));
        assert!(classify_growth(&HardyExpr::zero()).is_err());
    }

    #[test]
    fn boshernitzan_examples() {
        assert!(boshernitzan_condition(&p("x^(1/2)")).unwrap());
        assert!(!boshernitzan_condition(&p("log^1")).unwrap());
        assert!(boshernitzan_condition(&p("sqrt(2)*x^2")).unwrap());
        assert!(!boshernitzan_condition(&p("x^2 + 1/3*x")).unwrap());
        assert!(boshernitzan_condition(&p("x^2 + log^2")).unwrap());
        assert!(!boshernitzan_condition(&p("x^3 + 5*log^1 + sqrt(2)")).unwrap());
        assert!(boshernitzan_condition(&p("x*log^1")).unwrap());
        assert!(boshernitzan_condition(&p("x^(-1)")).is_err());
    }

    #[test]
    fn bold_h_examples() {
        assert!(is_in_bold_h(&p("x^(5/3)")).unwrap());
        assert!(is_in_bold_h(&p("log^2")).unwrap());
        assert!(!is_in_bold_h(&p("log^1")).unwrap());
        assert!(!is_in_bold_h(&p("x")).unwrap());
        assert!(!is_in_bold_h(&p("sqrt(2)*x^2")).unwrap());
        assert!(is_in_bold_h(&p("-x^(1/2)")).unwrap());
        assert!(is_in_bold_h(&p("x*log^1")).unwrap());
    }

    #[test]
    fn family_examples() {
        use CombinationDomain::*;
        let fam = |v: &[&str]| v.iter().map(|s| p(s)).collect::<Vec<_>>();
        for d in [Integers, Reals] {
            assert!(family_combination_check(&fam(&["x^(1/2)", "x^(1/3)"]), d).unwrap());
            assert!(family_combination_check(&fam(&["x^(1/2) + log^2", "2*x^(1/2) + log^2"]), d).unwrap());
            assert!(!family_combination_check(&fam(&["x^(1/2)", "2*x^(1/2)"]), d).unwrap());
            // x^(1/2) + x cancels to x, which is outside the window.
            assert!(!family_combination_check(&fam(&["x^(1/2) + x", "x^(1/3) + x"]), d).unwrap());
            assert!(!family_combination_check(&fam(&["x^2"]), d).unwrap());
        }
        // Dependent over R but not over Z.
        let f = fam(&["x^(1/2)", "sqrt(2)*x^(1/2)"]);
        assert!(family_combination_check(&f, Integers).unwrap());
        assert!(!family_combination_check(&f, Reals).unwrap());
        let g = fam(&["x^(1/2) + sqrt(2)*log^2", "sqrt(2)*x^(1/2) + 2*log^2"]);
        assert!(!family_combination_check(&g, Reals).unwrap());
        assert!(family_combination_check(&g, Integers).unwrap());
        assert!(family_combination_check(&[], Integers).is_err());
        assert!(family_combination_check(&[HardyExpr::zero()], Integers).is_err());
    }
}
