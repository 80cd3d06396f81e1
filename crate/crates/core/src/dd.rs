//! Double-double arithmetic.
//!
//! A value is the unevaluated sum `hi + lo` with `|lo| <= ulp(hi) / 2`, giving
//! roughly 106 bits of significand. This is enough to keep the fractional part
//! of `c * x^theta * log^k x` accurate to well below 1e-9 for magnitudes up to
//! 2^90, which plain `f64` cannot do past about 2^45.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

#[derive(Copy, Clone, Default, PartialEq)]
pub struct DoubleDouble {
    pub hi: f64,
    pub lo: f64,
}

#[inline]
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    let err = (a - (s - bb)) + (b - bb);
    (s, err)
}

#[inline]
fn quick_two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let err = b - (s - a);
    (s, err)
}

#[inline]
fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    let err = a.mul_add(b, -p);
    (p, err)
}

impl DoubleDouble {
    pub const ZERO: Self = Self { hi: 0.0, lo: 0.0 };
    pub const ONE: Self = Self { hi: 1.0, lo: 0.0 };
    pub const PI: Self = Self {
        hi: std::f64::consts::PI,
        lo: 1.2246467991473532e-16,
    };
    pub const E: Self = Self {
        hi: std::f64::consts::E,
        lo: 1.4456468917292502e-16,
    };
    pub const LN_2: Self = Self {
        hi: std::f64::consts::LN_2,
        lo: 2.3190468138462996e-17,
    };

    #[inline]
    pub const fn from_f64(x: f64) -> Self {
        Self { hi: x, lo: 0.0 }
    }

    #[inline]
    pub fn new(hi: f64, lo: f64) -> Self {
        let (h, l) = two_sum(hi, lo);
        Self { hi: h, lo: l }
    }

    /// Exact for every `i128` below 2^106 in magnitude.
    pub fn from_i128(v: i128) -> Self {
        let hi = v as f64;
        // `hi` rounds `v`; the remainder is small enough to be exact in i128.
        let rem = v - hi as i128;
        Self::new(hi, rem as f64)
    }

    pub fn from_ratio(num: i64, den: i64) -> Self {
        Self::from_i128(num as i128) / Self::from_i128(den as i128)
    }

    #[inline]
    pub fn to_f64(self) -> f64 {
        self.hi + self.lo
    }

    #[inline]
    pub fn is_finite(self) -> bool {
        self.hi.is_finite() && self.lo.is_finite()
    }

    #[inline]
    pub fn abs(self) -> Self {
        if self.hi < 0.0 || (self.hi == 0.0 && self.lo < 0.0) {
            -self
        } else {
            self
        }
    }

    #[inline]
    pub fn add_f64(self, b: f64) -> Self {
        let (s, e) = two_sum(self.hi, b);
        let (hi, lo) = quick_two_sum(s, e + self.lo);
        Self { hi, lo }
    }

    #[inline]
    pub fn mul_f64(self, b: f64) -> Self {
        let (p, e) = two_prod(self.hi, b);
        let (hi, lo) = quick_two_sum(p, e + self.lo * b);
        Self { hi, lo }
    }

    /// Multiplication by a power of two; exact barring overflow/underflow.
    #[inline]
    pub fn ldexp(self, exp: i32) -> Self {
        let s = 2f64.powi(exp);
        Self {
            hi: self.hi * s,
            lo: self.lo * s,
        }
    }

    pub fn sqr(self) -> Self {
        self * self
    }

    pub fn recip(self) -> Self {
        Self::ONE / self
    }

    pub fn sqrt(self) -> Self {
        if self.hi <= 0.0 {
            return if self.hi == 0.0 { Self::ZERO } else { Self::from_f64(f64::NAN) };
        }
        let y = self.hi.sqrt();
        let yy = Self::from_f64(y);
        // One Newton step from the f64 root doubles the correct bits.
        let residual = self - yy.sqr();
        yy + residual.mul_f64(0.5 / y)
    }

    /// Integer power by binary exponentiation.
    pub fn powi(self, n: i32) -> Self {
        if n == 0 {
            return Self::ONE;
        }
        let mut base = self;
        let mut e = n.unsigned_abs();
        let mut acc = Self::ONE;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * base;
            }
            e >>= 1;
            if e > 0 {
                base = base.sqr();
            }
        }
        if n < 0 {
            acc.recip()
        } else {
            acc
        }
    }

    pub fn exp(self) -> Self {
        if self.hi > 709.0 {
            return Self::from_f64(f64::INFINITY);
        }
        if self.hi < -745.0 {
            return Self::ZERO;
        }
        let k = (self.hi / Self::LN_2.hi).round();
        let r = self - Self::LN_2.mul_f64(k);
        // exp(r) = (exp(r / 1024))^1024, kept in expm1 form to avoid losing bits near 1.
        let s = r.ldexp(-10);
        let mut term = s;
        let mut sum = s;
        for i in 2..=12 {
            term = (term * s) / Self::from_f64(i as f64);
            sum = sum + term;
            if term.hi.abs() < 1e-34 {
                break;
            }
        }
        for _ in 0..10 {
            sum = sum.ldexp(1) + sum.sqr();
        }
        (sum + Self::ONE).ldexp(k as i32)
    }

    /// Natural logarithm; NaN for non-positive input.
    pub fn ln(self) -> Self {
        if self.hi <= 0.0 {
            return Self::from_f64(f64::NAN);
        }
        if self.hi == 1.0 && self.lo == 0.0 {
            return Self::ZERO;
        }
        let mut y = Self::from_f64(self.hi.ln());
        for _ in 0..2 {
            y = y + self * (-y).exp() - Self::ONE;
        }
        y
    }

    /// Nearest integer (ties away from zero), as a double-double.
    pub fn round(self) -> Self {
        let hi = self.hi.round();
        if hi == self.hi {
            // hi already integral; the rounding decision lives in lo.
            let lo = self.lo.round();
            let (h, l) = quick_two_sum(hi, lo);
            Self { hi: h, lo: l }
        } else if (hi - self.hi).abs() == 0.5 {
            // exact tie in hi; lo breaks it.
            let fl = self.hi.floor();
            if self.lo > 0.0 || (self.lo == 0.0 && self.hi > 0.0) {
                Self::from_f64(fl + 1.0)
            } else {
                Self::from_f64(fl)
            }
        } else {
            Self::from_f64(hi)
        }
    }

    pub fn floor(self) -> Self {
        let hi = self.hi.floor();
        if hi == self.hi {
            let lo = self.lo.floor();
            let (h, l) = quick_two_sum(hi, lo);
            Self { hi: h, lo: l }
        } else {
            Self::from_f64(hi)
        }
    }

    /// Split into the nearest integer and the signed remainder in `[-1/2, 1/2]`.
    pub fn split_nearest(self) -> (Self, f64) {
        let n = self.round();
        (n, (self - n).to_f64())
    }

    /// Parse a plain decimal literal such as `-12.3456`. Accurate to about 32 digits.
    pub fn parse_decimal(text: &str) -> Option<Self> {
        let t = text.trim();
        let (neg, body) = match t.strip_prefix('-') {
            Some(rest) => (true, rest),
            None => (false, t.strip_prefix('+').unwrap_or(t)),
        };
        if body.is_empty() {
            return None;
        }
        let mut acc = Self::ZERO;
        let mut frac_digits = 0i32;
        let mut seen_dot = false;
        let mut seen_digit = false;
        for ch in body.chars() {
            match ch {
                '0'..='9' => {
                    seen_digit = true;
                    acc = acc.mul_f64(10.0).add_f64((ch as u8 - b'0') as f64);
                    if seen_dot {
                        frac_digits += 1;
                    }
                }
                '.' if !seen_dot => seen_dot = true,
                _ => return None,
            }
        }
        if !seen_digit {
            return None;
        }
        let v = acc / Self::from_f64(10.0).powi(frac_digits);
        Some(if neg { -v } else { v })
    }
}

impl From<f64> for DoubleDouble {
    fn from(x: f64) -> Self {
        Self::from_f64(x)
    }
}

impl Add for DoubleDouble {
    type Output = Self;
    #[inline]
    fn add(self, b: Self) -> Self {
        let (s1, s2) = two_sum(self.hi, b.hi);
        let (t1, t2) = two_sum(self.lo, b.lo);
        let (s1, s2) = quick_two_sum(s1, s2 + t1);
        let (hi, lo) = quick_two_sum(s1, s2 + t2);
        Self { hi, lo }
    }
}

impl Sub for DoubleDouble {
    type Output = Self;
    #[inline]
    fn sub(self, b: Self) -> Self {
        self + (-b)
    }
}

impl Neg for DoubleDouble {
    type Output = Self;
    #[inline]
    fn neg(self) -> Self {
        Self {
            hi: -self.hi,
            lo: -self.lo,
        }
    }
}

impl Mul for DoubleDouble {
    type Output = Self;
    #[inline]
    fn mul(self, b: Self) -> Self {
        let (p, e) = two_prod(self.hi, b.hi);
        let e = e + (self.hi * b.lo + self.lo * b.hi);
        let (hi, lo) = quick_two_sum(p, e);
        Self { hi, lo }
    }
}

impl Div for DoubleDouble {
    type Output = Self;
    fn div(self, b: Self) -> Self {
        let q1 = self.hi / b.hi;
        let r = self - b.mul_f64(q1);
        let q2 = r.hi / b.hi;
        let r = r - b.mul_f64(q2);
        let q3 = r.hi / b.hi;
        let (hi, lo) = quick_two_sum(q1, q2);
        Self { hi, lo }.add_f64(q3)
    }
}

impl PartialOrd for DoubleDouble {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        match self.hi.partial_cmp(&other.hi) {
            Some(Ordering::Equal) => self.lo.partial_cmp(&other.lo),
            o => o,
        }
    }
}

impl fmt::Debug for DoubleDouble {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "DoubleDouble({:e} + {:e})", self.hi, self.lo)
    }
}

impl fmt::Display for DoubleDouble {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_f64())
    }
}

/// Fractional part of `n * alpha`, computed exactly from the binary expansion of `alpha`.
///
/// `alpha = m * 2^-s` exactly, so `{n * alpha} = ((n * m) mod 2^s) / 2^s`. The
/// modular product is carried out in `u128` whenever `s <= 64`; smaller alphas
/// fall back to double-double multiplication.
pub fn frac_of_product(n: i128, alpha: f64) -> f64 {
    if alpha == 0.0 || n == 0 {
        return 0.0;
    }
    let bits = alpha.abs().to_bits();
    let exp_bits = ((bits >> 52) & 0x7ff) as i32;
    let (mut mant, mut shift) = if exp_bits == 0 {
        (bits & ((1u64 << 52) - 1), 1074i32)
    } else {
        ((bits & ((1u64 << 52) - 1)) | (1u64 << 52), 1075 - exp_bits)
    };
    if mant != 0 {
        let tz = mant.trailing_zeros() as i32;
        let drop = tz.min(shift.max(0));
        mant >>= drop;
        shift -= drop;
    }
    let signed_n = if alpha < 0.0 { -n } else { n };
    if shift <= 0 {
        // alpha is an integer
        return 0.0;
    }
    if shift <= 64 {
        let modulus_mask: u128 = if shift == 128 { u128::MAX } else { (1u128 << shift) - 1 };
        let n_mod = (signed_n as u128) & modulus_mask; // two's complement gives n mod 2^s
        let n_mod64 = n_mod as u64 as u128;
        let prod = (n_mod64 * mant as u128) & modulus_mask;
        let f = prod as f64 / (1u128 << shift) as f64;
        // prod < 2^s, but the conversion can round up to exactly 1
        return if f >= 1.0 { 0.0 } else { f };
    }
    let v = DoubleDouble::from_i128(n).mul_f64(alpha);
    let (_, r) = v.split_nearest();
    if r < 0.0 {
        let f = r + 1.0;
        if f >= 1.0 {
            0.0
        } else {
            f
        }
    } else {
        r
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: DoubleDouble, b: f64, tol: f64) -> bool {
        ((a - DoubleDouble::from_f64(b)).to_f64()).abs() <= tol
    }

    #[test]
    fn arithmetic_basics() {
        let third = DoubleDouble::from_ratio(1, 3);
        let back = third.mul_f64(3.0);
        assert!((back - DoubleDouble::ONE).to_f64().abs() < 1e-31);
        let two = DoubleDouble::from_f64(2.0);
        let r = two.sqrt();
        assert!((r.sqr() - two).to_f64().abs() < 1e-30);
    }

    #[test]
    fn exp_ln_roundtrip() {
        for &x in &[1e-3, 0.5, 1.0, 2.0, 10.0, 1e6, 1e12] {
            let d = DoubleDouble::from_f64(x);
            let back = d.ln().exp();
            assert!(((back - d) / d).to_f64().abs() < 1e-29, "x = {x} err {:e}", ((back - d) / d).to_f64());
        }
        assert!(close(DoubleDouble::ONE.exp(), std::f64::consts::E, 1e-15));
        assert!(((DoubleDouble::ONE.exp() - DoubleDouble::E).to_f64()).abs() < 1e-30);
        assert!(((DoubleDouble::from_f64(2.0).ln() - DoubleDouble::LN_2).to_f64()).abs() < 1e-31);
    }

    #[test]
    fn powi_matches_exact_integers() {
        let x = DoubleDouble::from_f64(999_983.0);
        let cube = x.powi(3);
        let exact: i128 = 999_983i128.pow(3);
        assert_eq!((cube - DoubleDouble::from_i128(exact)).to_f64(), 0.0);
    }

    #[test]
    fn round_and_floor() {
        let v = DoubleDouble::new(4.0, -1e-20);
        assert_eq!(v.floor().to_f64(), 3.0);
        assert_eq!(v.round().to_f64(), 4.0);
        let w = DoubleDouble::from_f64(-2.5);
        assert_eq!(w.floor().to_f64(), -3.0);
    }

    #[test]
    fn parse_decimal_literals() {
        let v = DoubleDouble::parse_decimal("0.1").unwrap();
        assert!(((v.mul_f64(10.0)) - DoubleDouble::ONE).to_f64().abs() < 1e-31);
        assert!(DoubleDouble::parse_decimal("1.2.3").is_none());
        assert!(DoubleDouble::parse_decimal("").is_none());
        assert_eq!(DoubleDouble::parse_decimal("-2").unwrap().to_f64(), -2.0);
    }

    #[test]
    fn frac_of_product_exact() {
        assert_eq!(frac_of_product(3, 0.5), 0.5);
        assert_eq!(frac_of_product(-3, 0.25), 0.25);
        assert_eq!(frac_of_product(7, 2.0), 0.0);
        let alpha = 0.1;
        // alpha is the binary double nearest 0.1; 10 * alpha is slightly above 1.
        let f = frac_of_product(10, alpha);
        assert!(f < 1e-15);
        let big = 1_000_000_007i128 * 1_000_000_007;
        let f = frac_of_product(big, 0.75);
        assert!((f - 0.75).abs() < 1e-15);
    }
}
