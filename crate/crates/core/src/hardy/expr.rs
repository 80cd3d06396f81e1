use std::cmp::Ordering;

use num_rational::Rational64;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use super::coefficient::Coefficient;
use crate::dd::DoubleDouble;
use crate::error::{Error, Result};

/// Above this magnitude plain `f64` products lose the low bits of the fractional part.
pub const COMPENSATED_THRESHOLD: f64 = 35_184_372_088_832.0; // 2^45
/// Largest magnitude whose fractional part double-double still resolves.
pub const COMPENSATED_LIMIT: f64 = 1_237_940_039_285_380_274_899_124_224.0; // 2^90
/// Distance to an integer under which a value is snapped to that integer.
pub const BOUNDARY_EPS: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Precision {
    Standard,
    Compensated,
}

/// One term `coeff * x^theta * (log x)^logpow`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Term {
    pub coeff: Coefficient,
    pub theta: Rational64,
    pub logpow: u32,
}

impl Term {
    pub fn signature(&self) -> (Rational64, u32) {
        (self.theta, self.logpow)
    }
}

/// Finite sum of terms `c * x^theta * log^k x`, kept normalized: signatures
/// are unique, coefficients nonzero, and terms sorted by decreasing growth.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct HardyExpr {
    terms: Vec<Term>,
}

/// A fractional part `{v}` together with whether the boundary snap fired.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FracValue {
    pub frac: f64,
    pub boundary: bool,
}

fn growth_cmp(a: &(Rational64, u32), b: &(Rational64, u32)) -> Ordering {
    b.0.cmp(&a.0).then(b.1.cmp(&a.1))
}

impl HardyExpr {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn from_terms<I: IntoIterator<Item = Term>>(terms: I) -> Self {
        let mut merged: Vec<Term> = Vec::new();
        let mut all: Vec<Term> = terms.into_iter().collect();
        all.sort_by(|a, b| growth_cmp(&a.signature(), &b.signature()));
        for t in all {
            match merged.last_mut() {
                Some(last) if last.signature() == t.signature() => {
                    last.coeff = last.coeff.add(&t.coeff);
                }
                _ => merged.push(t),
            }
        }
        merged.retain(|t| !t.coeff.is_zero());
        Self { terms: merged }
    }

    pub fn monomial(coeff: Coefficient, theta: Rational64, logpow: u32) -> Self {
        Self::from_terms([Term {
            coeff,
            theta,
            logpow,
        }])
    }

    /// `x^(num/den)` with unit coefficient.
    pub fn power(num: i64, den: i64) -> Self {
        Self::monomial(Coefficient::integer(1), Rational64::new(num, den), 0)
    }

    /// `(log x)^k` with unit coefficient.
    pub fn log_power(k: u32) -> Self {
        Self::monomial(Coefficient::integer(1), Rational64::zero(), k)
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn leading(&self) -> Option<&Term> {
        self.terms.first()
    }

    /// True when every exponent is non-negative, the class admitted as
    /// experiment input. Derivatives may leave it.
    pub fn is_subpolynomial_input(&self) -> bool {
        self.terms.iter().all(|t| !t.theta.is_negative())
    }

    pub fn add(&self, other: &Self) -> Self {
        Self::from_terms(self.terms.iter().chain(other.terms.iter()).cloned())
    }

    pub fn scale(&self, r: Rational64) -> Self {
        Self::from_terms(self.terms.iter().map(|t| Term {
            coeff: t.coeff.scale(r),
            ..t.clone()
        }))
    }

    pub fn scale_coeff(&self, c: &Coefficient) -> Result<Self> {
        let terms = self
            .terms
            .iter()
            .map(|t| {
                let coeff = t.coeff.checked_mul(c).ok_or_else(|| {
                    Error::InvalidArgument("coefficient product leaves the symbolic class".into())
                })?;
                Ok(Term { coeff, ..t.clone() })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self::from_terms(terms))
    }

    pub fn neg(&self) -> Self {
        self.scale(-Rational64::one())
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    /// Integer linear combination `sum coeffs[i] * exprs[i]`.
    pub fn linear_combination(exprs: &[HardyExpr], coeffs: &[i64]) -> Result<Self> {
        if exprs.len() != coeffs.len() {
            return Err(Error::Dimension(format!(
                "{} expressions but {} coefficients",
                exprs.len(),
                coeffs.len()
            )));
        }
        Ok(Self::from_terms(exprs.iter().zip(coeffs).flat_map(|(e, &b)| {
            e.terms.iter().map(move |t| Term {
                coeff: t.coeff.scale(Rational64::from_integer(b)),
                ..t.clone()
            })
        })))
    }

    /// Term-by-term product.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        let mut out = Vec::with_capacity(self.terms.len() * other.terms.len());
        for a in &self.terms {
            for b in &other.terms {
                let coeff = a.coeff.checked_mul(&b.coeff).ok_or_else(|| {
                    Error::InvalidArgument("coefficient product leaves the symbolic class".into())
                })?;
                out.push(Term {
                    coeff,
                    theta: a.theta + b.theta,
                    logpow: a.logpow + b.logpow,
                });
            }
        }
        Ok(Self::from_terms(out))
    }

    /// d/dx [c x^t log^k x] = c t x^(t-1) log^k x + c k x^(t-1) log^(k-1) x.
    pub fn differentiate(&self) -> Self {
        let one = Rational64::one();
        Self::from_terms(self.terms.iter().flat_map(|t| {
            let mut out = Vec::with_capacity(2);
            if !t.theta.is_zero() {
                out.push(Term {
                    coeff: t.coeff.scale(t.theta),
                    theta: t.theta - one,
                    logpow: t.logpow,
                });
            }
            if t.logpow > 0 {
                out.push(Term {
                    coeff: t.coeff.scale(Rational64::from_integer(t.logpow as i64)),
                    theta: t.theta - one,
                    logpow: t.logpow - 1,
                });
            }
            out
        }))
    }

    pub fn nth_derivative(&self, n: u32) -> Self {
        (0..n).fold(self.clone(), |e, _| e.differentiate())
    }

    /// Evaluate at `x >= 1`.
    ///
    /// Standard precision refuses results above 2^45 in magnitude, where the
    /// fractional part is no longer trustworthy; compensated precision
    /// accumulates every power and product in double-double.
    pub fn evaluate(&self, x: f64, precision: Precision) -> Result<f64> {
        match precision {
            Precision::Standard => {
                let v = self.evaluate_f64(x)?;
                if v.abs() > COMPENSATED_THRESHOLD {
                    return Err(Error::PrecisionRequired { magnitude: v.abs() });
                }
                Ok(v)
            }
            Precision::Compensated => Ok(self.evaluate_dd(x)?.to_f64()),
        }
    }

    fn check_arg(x: f64) -> Result<()> {
        if !x.is_finite() || x < 1.0 {
            return Err(Error::Domain(format!("argument {x} must be finite and >= 1")));
        }
        Ok(())
    }

    /// Plain `f64` evaluation with no magnitude guard.
    pub fn evaluate_f64(&self, x: f64) -> Result<f64> {
        Self::check_arg(x)?;
        let ln = x.ln();
        let mut acc = 0.0;
        for t in &self.terms {
            let theta = t.theta.to_f64().unwrap_or(f64::NAN);
            acc += t.coeff.value() * x.powf(theta) * ln.powi(t.logpow as i32);
        }
        if !acc.is_finite() {
            return Err(Error::NonFinite);
        }
        Ok(acc)
    }

    pub fn evaluate_dd(&self, x: f64) -> Result<DoubleDouble> {
        Self::check_arg(x)?;
        let xd = DoubleDouble::from_f64(x);
        let needs_ln = self
            .terms
            .iter()
            .any(|t| t.logpow > 0 || *t.theta.denom() > 2);
        let ln = if needs_ln { xd.ln() } else { DoubleDouble::ZERO };
        let needs_sqrt = self.terms.iter().any(|t| *t.theta.denom() == 2);
        let sqrt_x = if needs_sqrt { xd.sqrt() } else { DoubleDouble::ZERO };
        let mut acc = DoubleDouble::ZERO;
        for t in &self.terms {
            let num = *t.theta.numer();
            let den = *t.theta.denom();
            let pow = match (den, i32::try_from(num)) {
                (1, Ok(n)) => xd.powi(n),
                (2, Ok(n)) => sqrt_x.powi(n),
                _ => (ln * DoubleDouble::from_ratio(num, den)).exp(),
            };
            let mut term = t.coeff.value_dd() * pow;
            if t.logpow > 0 {
                term = term * ln.powi(t.logpow as i32);
            }
            acc = acc + term;
        }
        if !acc.is_finite() {
            return Err(Error::NonFinite);
        }
        Ok(acc)
    }

    /// `q * self(x)` in double-double, rejected beyond the compensated range.
    pub fn scaled_value(&self, x: f64, q: i64) -> Result<DoubleDouble> {
        let v = self.evaluate_dd(x)?.mul_f64(q as f64);
        let mag = v.hi.abs();
        if mag > COMPENSATED_LIMIT {
            return Err(Error::Overflow { magnitude: mag });
        }
        Ok(v)
    }

    /// Signed distance of `q * self(x)` from its nearest integer, in `[-1/2, 1/2]`.
    pub fn phase(&self, x: f64, q: i64) -> Result<f64> {
        Ok(self.scaled_value(x, q)?.split_nearest().1)
    }

    /// Fractional part of `q * self(x)` with the boundary tie-break: values
    /// within 1e-9 of an integer `m` count as `m`.
    pub fn frac_scaled(&self, x: f64, q: i64) -> Result<FracValue> {
        let r = self.phase(x, q)?;
        if r.abs() < BOUNDARY_EPS {
            return Ok(FracValue {
                frac: 0.0,
                boundary: r != 0.0,
            });
        }
        let frac = if r < 0.0 { r + 1.0 } else { r };
        Ok(FracValue {
            frac: if frac >= 1.0 { 0.0 } else { frac },
            boundary: false,
        })
    }

    /// `[self(x)]` with the same boundary tie-break; returns `(floor, boundary_event)`.
    pub fn floor_at(&self, x: f64) -> Result<(i64, bool)> {
        let v = self.scaled_value(x, 1)?;
        let (n, r) = v.split_nearest();
        let n = n.hi as i128 + n.lo as i128;
        let (fl, boundary) = if r.abs() < BOUNDARY_EPS {
            (n, r != 0.0)
        } else if r > 0.0 {
            (n, false)
        } else {
            (n - 1, false)
        };
        let fl = i64::try_from(fl).map_err(|_| Error::Overflow { magnitude: v.hi.abs() })?;
        Ok((fl, boundary))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn x(num: i64, den: i64) -> HardyExpr {
        HardyExpr::power(num, den)
    }

    #[test]
    fn normalization_merges_and_sorts() {
        let e = x(1, 2).add(&x(2, 1)).add(&x(1, 2)).add(&HardyExpr::log_power(2));
        let sigs: Vec<_> = e.terms().iter().map(|t| t.signature()).collect();
        assert_eq!(
            sigs,
            vec![
                (Rational64::from_integer(2), 0),
                (Rational64::new(1, 2), 0),
                (Rational64::zero(), 2)
            ]
        );
        assert_eq!(e.terms()[1].coeff, Coefficient::integer(2));
        assert!(x(1, 2).sub(&x(1, 2)).is_zero());
    }

    #[test]
    fn evaluate_examples() {
        assert_eq!(x(3, 2).evaluate(4.0, Precision::Standard).unwrap(), 8.0);
        assert_eq!(x(3, 2).evaluate(4.0, Precision::Compensated).unwrap(), 8.0);
        assert_eq!(HardyExpr::zero().evaluate(10.0, Precision::Standard).unwrap(), 0.0);
        assert!(x(1, 1).evaluate(0.5, Precision::Standard).is_err());
        assert!(x(1, 1).evaluate(f64::NAN, Precision::Compensated).is_err());
        let big = x(3, 1);
        assert!(matches!(
            big.evaluate(1e6, Precision::Standard),
            Err(Error::PrecisionRequired { .. })
        ));
        assert_eq!(big.evaluate(1e6, Precision::Compensated).unwrap(), 1e18);
    }

    #[test]
    fn differentiate_examples() {
        assert_eq!(x(2, 1).differentiate(), x(1, 1).scale(Rational64::from_integer(2)));
        let lg = HardyExpr::log_power(1);
        assert_eq!(lg.differentiate(), x(-1, 1));
        let e = x(1, 2).mul(&lg).unwrap();
        let expected = x(-1, 2).mul(&lg).unwrap().scale(Rational64::new(1, 2)).add(&x(-1, 2));
        assert_eq!(e.differentiate(), expected);
        assert!(HardyExpr::monomial(Coefficient::integer(7), Rational64::zero(), 0)
            .differentiate()
            .is_zero());
    }

    #[test]
    fn frac_and_floor_tie_break() {
        let half = x(1, 1).scale(Rational64::new(1, 2));
        assert_eq!(half.frac_scaled(7.0, 1).unwrap().frac, 0.5);
        assert_eq!(half.frac_scaled(7.0, 2).unwrap().frac, 0.0);
        let (fl, _) = x(1, 2).floor_at(2.0).unwrap();
        assert_eq!(fl, 1);
        let (fl, b) = x(1, 2).floor_at(9.0).unwrap();
        assert_eq!((fl, b), (3, false));
        // 1e-12 below an integer is snapped up and reported.
        let near = x(1, 1).add(&HardyExpr::monomial(
            Coefficient::declared("-0.000000000001").unwrap(),
            Rational64::zero(),
            0,
        ));
        assert_eq!(near.floor_at(5.0).unwrap(), (5, true));
        let f = near.frac_scaled(5.0, 1).unwrap();
        assert_eq!((f.frac, f.boundary), (0.0, true));
    }

    #[test]
    fn overflow_rejected() {
        let e = x(4, 1);
        assert!(matches!(e.scaled_value(1e23, 1), Err(Error::Overflow { .. })));
    }
}
