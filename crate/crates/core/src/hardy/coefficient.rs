use std::collections::BTreeMap;
use std::fmt;

use num_integer::Integer;
use num_rational::Rational64;
use num_traits::{One, Signed, Zero};

use crate::dd::DoubleDouble;
use crate::error::{Error, Result};

/// A named irrational constant.
///
/// Distinct symbols are treated as linearly independent over Q together with 1.
/// For square roots of distinct square-free radicands this is a theorem; for
/// `Pi`, `E` and user-declared constants it is a declaration.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Irrational {
    /// `sqrt(m)` with `m > 1` square-free.
    Sqrt(u64),
    Pi,
    E,
    /// A user-declared irrational given by a decimal approximation; the
    /// normalized literal is its identity.
    Declared(String),
}

impl Irrational {
    pub fn value(&self) -> DoubleDouble {
        match self {
            Irrational::Sqrt(m) => DoubleDouble::from_f64(*m as f64).sqrt(),
            Irrational::Pi => DoubleDouble::PI,
            Irrational::E => DoubleDouble::E,
            Irrational::Declared(lit) => DoubleDouble::parse_decimal(lit).unwrap_or_default(),
        }
    }
}

impl fmt::Display for Irrational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Irrational::Sqrt(m) => write!(f, "sqrt({m})"),
            Irrational::Pi => write!(f, "pi"),
            Irrational::E => write!(f, "e"),
            Irrational::Declared(lit) => write!(f, "irr({lit})"),
        }
    }
}

/// A real coefficient held exactly as `r0 + sum r_s * s` over named irrationals.
///
/// Rationality is therefore decided symbolically and never read off floating
/// point bits.
#[derive(Clone, Debug)]
pub struct Coefficient {
    rational: Rational64,
    parts: BTreeMap<Irrational, Rational64>,
    value: DoubleDouble,
}

impl PartialEq for Coefficient {
    fn eq(&self, other: &Self) -> bool {
        self.rational == other.rational && self.parts == other.parts
    }
}

impl Eq for Coefficient {}

fn rational_dd(r: Rational64) -> DoubleDouble {
    DoubleDouble::from_ratio(*r.numer(), *r.denom())
}

impl Coefficient {
    fn build(rational: Rational64, mut parts: BTreeMap<Irrational, Rational64>) -> Self {
        parts.retain(|_, r| !r.is_zero());
        let mut value = rational_dd(rational);
        for (sym, r) in &parts {
            value = value + sym.value() * rational_dd(*r);
        }
        Self {
            rational,
            parts,
            value,
        }
    }

    pub fn zero() -> Self {
        Self::build(Rational64::zero(), BTreeMap::new())
    }

    pub fn integer(n: i64) -> Self {
        Self::build(Rational64::from_integer(n), BTreeMap::new())
    }

    pub fn from_rational(r: Rational64) -> Self {
        Self::build(r, BTreeMap::new())
    }

    pub fn rational(num: i64, den: i64) -> Result<Self> {
        if den == 0 {
            return Err(Error::InvalidArgument("zero denominator".into()));
        }
        Ok(Self::from_rational(Rational64::new(num, den)))
    }

    /// `sqrt(n)`, simplified to `s * sqrt(m)` with `m` square-free.
    pub fn sqrt(n: u64) -> Self {
        let (outer, inner) = split_square(n);
        let outer = Rational64::from_integer(outer as i64);
        if inner == 1 || n == 0 {
            return Self::from_rational(outer);
        }
        Self::build(
            Rational64::zero(),
            BTreeMap::from([(Irrational::Sqrt(inner), outer)]),
        )
    }

    /// The golden ratio, stored as `1/2 + sqrt(5)/2`.
    pub fn phi() -> Self {
        let half = Rational64::new(1, 2);
        Self::build(half, BTreeMap::from([(Irrational::Sqrt(5), half)]))
    }

    pub fn pi() -> Self {
        Self::symbol(Irrational::Pi)
    }

    pub fn e() -> Self {
        Self::symbol(Irrational::E)
    }

    /// A declared irrational with the given decimal approximation.
    pub fn declared(decimal: &str) -> Result<Self> {
        let lit = normalize_decimal(decimal)
            .ok_or_else(|| Error::InvalidArgument(format!("bad decimal literal '{decimal}'")))?;
        Ok(Self::symbol(Irrational::Declared(lit)))
    }

    pub fn symbol(sym: Irrational) -> Self {
        Self::build(Rational64::zero(), BTreeMap::from([(sym, Rational64::one())]))
    }

    pub fn is_zero(&self) -> bool {
        self.rational.is_zero() && self.parts.is_empty()
    }

    pub fn is_rational(&self) -> bool {
        self.parts.is_empty()
    }

    pub fn as_rational(&self) -> Option<Rational64> {
        self.is_rational().then_some(self.rational)
    }

    pub fn rational_part(&self) -> Rational64 {
        self.rational
    }

    pub fn irrational_parts(&self) -> &BTreeMap<Irrational, Rational64> {
        &self.parts
    }

    pub fn value(&self) -> f64 {
        self.value.to_f64()
    }

    pub fn value_dd(&self) -> DoubleDouble {
        self.value
    }

    pub fn scale(&self, r: Rational64) -> Self {
        let parts = self.parts.iter().map(|(s, v)| (s.clone(), *v * r)).collect();
        Self::build(self.rational * r, parts)
    }

    /// Exact product when it stays in the representable class: one side
    /// rational, or both pure square roots.
    pub fn checked_mul(&self, other: &Self) -> Option<Self> {
        if let Some(r) = self.as_rational() {
            return Some(other.scale(r));
        }
        if let Some(r) = other.as_rational() {
            return Some(self.scale(r));
        }
        let sqrt_only = |c: &Coefficient| {
            c.parts.keys().all(|s| matches!(s, Irrational::Sqrt(_)))
        };
        if !sqrt_only(self) || !sqrt_only(other) {
            return None;
        }
        // (a + sum b_i sqrt(m_i)) (c + sum d_j sqrt(n_j)) with sqrt(m) sqrt(n) = sqrt(mn).
        let expand = |c: &Coefficient| {
            let mut v: Vec<(u64, Rational64)> = vec![(1, c.rational)];
            v.extend(c.parts.iter().map(|(s, r)| match s {
                Irrational::Sqrt(m) => (*m, *r),
                _ => unreachable!(),
            }));
            v
        };
        let mut acc = Self::zero();
        for (m, a) in expand(self) {
            for (n, b) in expand(other) {
                if a.is_zero() || b.is_zero() {
                    continue;
                }
                let g = m.gcd(&n);
                // sqrt(m) sqrt(n) = g * sqrt((m/g) (n/g))
                let rad = (m / g).checked_mul(n / g)?;
                let piece = Self::sqrt(rad).scale(a * b * Rational64::from_integer(g as i64));
                acc = acc.add(&piece);
            }
        }
        Some(acc)
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut parts = self.parts.clone();
        for (s, r) in &other.parts {
            *parts.entry(s.clone()).or_insert_with(Rational64::zero) += *r;
        }
        Self::build(self.rational + other.rational, parts)
    }

    pub fn neg(&self) -> Self {
        self.scale(-Rational64::one())
    }

    /// Sign of the real value. Exact for rationals; irrational values are
    /// never zero, so the double-double sign is reliable for them.
    pub fn signum(&self) -> i32 {
        if self.is_zero() {
            0
        } else if let Some(r) = self.as_rational() {
            if r.is_positive() {
                1
            } else {
                -1
            }
        } else if self.value.hi > 0.0 || (self.value.hi == 0.0 && self.value.lo > 0.0) {
            1
        } else {
            -1
        }
    }
}

/// `n = outer^2 * inner` with `inner` square-free.
fn split_square(mut n: u64) -> (u64, u64) {
    if n == 0 {
        return (0, 1);
    }
    let mut outer = 1u64;
    let mut inner = 1u64;
    let mut p = 2u64;
    while p * p <= n {
        let mut e = 0;
        while n % p == 0 {
            n /= p;
            e += 1;
        }
        outer *= p.pow(e / 2);
        if e % 2 == 1 {
            inner *= p;
        }
        p += 1;
    }
    inner *= n;
    (outer, inner)
}

fn normalize_decimal(text: &str) -> Option<String> {
    let t = text.trim();
    let (neg, body) = match t.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, t),
    };
    let (int_part, frac_part) = match body.split_once('.') {
        Some((i, f)) => (i, f),
        None => (body, ""),
    };
    if int_part.is_empty() && frac_part.is_empty() {
        return None;
    }
    if !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit()) {
        return None;
    }
    let int_part = int_part.trim_start_matches('0');
    let frac_part = frac_part.trim_end_matches('0');
    let mut s = String::new();
    if neg && !(int_part.is_empty() && frac_part.is_empty()) {
        s.push('-');
    }
    s.push_str(if int_part.is_empty() { "0" } else { int_part });
    if !frac_part.is_empty() {
        s.push('.');
        s.push_str(frac_part);
    }
    Some(s)
}

pub(crate) fn fmt_rational(r: Rational64) -> String {
    if r.is_integer() {
        format!("{}", r.numer())
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}
