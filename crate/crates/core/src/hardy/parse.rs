//! Text syntax for [`HardyExpr`].
//!
//! ```text
//! expr     := ws sign? term (ws ('+' | '-') ws term)*
//! term     := factor (ws '*' ws factor)*
//! factor   := number ('/' integer)?          rational literal, e.g. 3, 0.37, 1/3
//!           | 'sqrt(' integer ')' | 'phi' | 'pi' | 'e' | 'irr(' decimal ')'
//!           | 'x' ('^' exponent)?
//!           | 'log^' integer                 (log x)^k, k >= 1
//! exponent := integer | '(' '-'? integer ('/' integer)? ')'
//! ```
//!
//! Decimal literals are exact rationals (`0.37` is `37/100`). Irrational
//! constants are only introduced by the named tokens. A bare `log` without a
//! power is rejected. Factors within a term multiply; terms with the same
//! `(theta, k)` signature merge.

use std::fmt;
use std::str::FromStr;

use num_rational::Rational64;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::coefficient::{fmt_rational, Coefficient};
use super::expr::{HardyExpr, Term};
use crate::error::{Error, Result};

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl<'a> Parser<'a> {
    fn err<T>(&self, msg: impl Into<String>) -> Result<T> {
        Err(Error::Parse {
            pos: self.pos,
            msg: msg.into(),
        })
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&self) -> Option<u8> {
        self.src.get(self.pos).copied()
    }

    fn eat(&mut self, c: u8) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: u8) -> Result<()> {
        if self.eat(c) {
            Ok(())
        } else {
            self.err(format!("expected '{}'", c as char))
        }
    }

    fn keyword(&mut self, kw: &str) -> bool {
        let end = self.pos + kw.len();
        if end <= self.src.len() && &self.src[self.pos..end] == kw.as_bytes() {
            let next_is_ident = self
                .src
                .get(end)
                .is_some_and(|c| c.is_ascii_alphanumeric() || *c == b'_');
            if !next_is_ident {
                self.pos = end;
                return true;
            }
        }
        false
    }

    fn digits(&mut self) -> Result<&'a str> {
        let start = self.pos;
        while self.peek().is_some_and(|c| c.is_ascii_digit()) {
            self.pos += 1;
        }
        if start == self.pos {
            return self.err("expected digits");
        }
        Ok(std::str::from_utf8(&self.src[start..self.pos]).unwrap())
    }

    fn integer(&mut self) -> Result<i64> {
        let d = self.digits()?;
        d.parse::<i64>().or_else(|_| self.err("integer out of range"))
    }

    fn number(&mut self) -> Result<Rational64> {
        let int_part = self.digits()?;
        let mut value = Rational64::from_integer(
            int_part.parse::<i64>().or_else(|_| self.err("integer out of range"))?,
        );
        if self.eat(b'.') {
            let frac = self.digits()?;
            let scale = 10i64
                .checked_pow(frac.len() as u32)
                .ok_or(())
                .or_else(|_| self.err("too many decimal digits"))?;
            let num: i64 = frac.parse().or_else(|_| self.err("decimal out of range"))?;
            value += Rational64::new(num, scale);
        }
        if self.peek() == Some(b'/') {
            self.pos += 1;
            let den = self.integer()?;
            if den == 0 {
                return self.err("zero denominator");
            }
            value /= Rational64::from_integer(den);
        }
        Ok(value)
    }

    fn exponent(&mut self) -> Result<Rational64> {
        if self.eat(b'(') {
            self.skip_ws();
            let neg = self.eat(b'-');
            let num = self.integer()?;
            let den = if self.eat(b'/') { self.integer()? } else { 1 };
            if den == 0 {
                return self.err("zero denominator");
            }
            self.skip_ws();
            self.expect(b')')?;
            let r = Rational64::new(num, den);
            Ok(if neg { -r } else { r })
        } else {
            Ok(Rational64::from_integer(self.integer()?))
        }
    }

    fn term(&mut self) -> Result<Term> {
        let mut coeff = Coefficient::integer(1);
        let mut theta = Rational64::zero();
        let mut logpow = 0u32;
        loop {
            self.skip_ws();
            let c = match self.peek() {
                Some(c) => c,
                None => return self.err("expected a factor"),
            };
            if c.is_ascii_digit() {
                let r = self.number()?;
                coeff = coeff.scale(r);
            } else if self.keyword("sqrt") {
                self.expect(b'(')?;
                self.skip_ws();
                let n = self.integer()?;
                self.skip_ws();
                self.expect(b')')?;
                coeff = self.mul_coeff(&coeff, &Coefficient::sqrt(n as u64))?;
            } else if self.keyword("phi") {
                coeff = self.mul_coeff(&coeff, &Coefficient::phi())?;
            } else if self.keyword("pi") {
                coeff = self.mul_coeff(&coeff, &Coefficient::pi())?;
            } else if self.keyword("irr") {
                self.expect(b'(')?;
                let start = self.pos;
                while self.peek().is_some_and(|c| c != b')') {
                    self.pos += 1;
                }
                let lit = std::str::from_utf8(&self.src[start..self.pos]).unwrap().to_string();
                self.expect(b')')?;
                let sym = Coefficient::declared(&lit).or_else(|_| self.err("bad irr() literal"))?;
                coeff = self.mul_coeff(&coeff, &sym)?;
            } else if self.keyword("e") {
                coeff = self.mul_coeff(&coeff, &Coefficient::e())?;
            } else if self.keyword("x") {
                if self.eat(b'^') {
                    theta += self.exponent()?;
                } else {
                    theta += Rational64::one();
                }
            } else if c == b'l' && self.src[self.pos..].starts_with(b"log") {
                self.pos += 3;
                if !self.eat(b'^') {
                    return self.err("'log' needs an explicit power, e.g. log^1");
                }
                let k = self.integer()?;
                if k < 1 {
                    return self.err("log power must be >= 1");
                }
                logpow += k as u32;
            } else {
                return self.err(format!("unexpected character '{}'", c as char));
            }
            self.skip_ws();
            if !self.eat(b'*') {
                break;
            }
        }
        Ok(Term {
            coeff,
            theta,
            logpow,
        })
    }

    fn mul_coeff(&self, a: &Coefficient, b: &Coefficient) -> Result<Coefficient> {
        match a.checked_mul(b) {
            Some(c) => Ok(c),
            None => self.err("product of these irrational constants is not representable"),
        }
    }

    fn expr(&mut self) -> Result<HardyExpr> {
        let mut terms = Vec::new();
        self.skip_ws();
        let mut negative = if self.eat(b'-') {
            true
        } else {
            self.eat(b'+');
            false
        };
        loop {
            let mut t = self.term()?;
            if negative {
                t.coeff = t.coeff.neg();
            }
            terms.push(t);
            self.skip_ws();
            match self.peek() {
                None => break,
                Some(b'+') => negative = false,
                Some(b'-') => negative = true,
                Some(c) => return self.err(format!("unexpected character '{}'", c as char)),
            }
            self.pos += 1;
        }
        Ok(HardyExpr::from_terms(terms))
    }
}

impl FromStr for HardyExpr {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut p = Parser {
            src: s.as_bytes(),
            pos: 0,
        };
        p.expr()
    }
}

fn fmt_x_log(theta: Rational64, logpow: u32) -> Vec<String> {
    let mut parts = Vec::new();
    if !theta.is_zero() {
        if theta == Rational64::one() {
            parts.push("x".to_string());
        } else if theta.is_integer() && theta.is_positive() {
            parts.push(format!("x^{}", theta.numer()));
        } else {
            parts.push(format!("x^({})", fmt_rational(theta)));
        }
    }
    if logpow > 0 {
        parts.push(format!("log^{logpow}"));
    }
    parts
}

impl fmt::Display for HardyExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for t in self.terms() {
            let tail = fmt_x_log(t.theta, t.logpow);
            // Each rational / symbolic component of the coefficient prints as its own
            // term; parsing merges them back by signature.
            let mut comps: Vec<(Rational64, Option<String>)> = Vec::new();
            if !t.coeff.rational_part().is_zero() {
                comps.push((t.coeff.rational_part(), None));
            }
            for (sym, r) in t.coeff.irrational_parts() {
                comps.push((*r, Some(sym.to_string())));
            }
            for (r, sym) in comps {
                let neg = r.is_negative();
                if first {
                    if neg {
                        write!(f, "-")?;
                    }
                } else {
                    write!(f, " {} ", if neg { '-' } else { '+' })?;
                }
                first = false;
                let mag = r.abs();
                let mut factors = Vec::new();
                if mag != Rational64::one() || (sym.is_none() && tail.is_empty()) {
                    factors.push(fmt_rational(mag));
                }
                factors.extend(sym);
                factors.extend(tail.iter().cloned());
                write!(f, "{}", factors.join("*"))?;
            }
        }
        Ok(())
    }
}

impl Serialize for HardyExpr {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for HardyExpr {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}
