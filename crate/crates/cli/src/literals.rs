//! Small literal formats for matrices, boxes, masks and measures on the command line.

use std::collections::BTreeMap;
use std::str::FromStr;

use num_complex::Complex64;
use primeud::ergodic::TorusBox;
use num_rational::Rational64;

use crate::CliError;

fn bad(what: &str, s: &str) -> CliError {
    CliError::Validation(format!("malformed {what}: {s:?}"))
}

fn list<T: FromStr>(s: &str, what: &str) -> Result<Vec<T>, CliError> {
    s.split(',').map(|x| x.trim().parse().map_err(|_| bad(what, s))).collect()
}

/// `"a,b;c,d"` as rows.
pub fn matrix<T: FromStr>(s: &str, what: &str) -> Result<Vec<Vec<T>>, CliError> {
    let rows: Vec<Vec<T>> = s
        .split(';')
        .filter(|r| !r.trim().is_empty())
        .map(|r| list(r, what))
        .collect::<Result<_, _>>()?;
    if rows.is_empty() || rows.iter().any(|r| r.len() != rows[0].len()) {
        return Err(bad(what, s));
    }
    Ok(rows)
}

fn rational(s: &str) -> Result<Rational64, CliError> {
    s.trim().parse().map_err(|_| bad("rational", s))
}

/// `"lo1,lo2:hi1,hi2;..."` with rational corners such as `1/3`.
pub fn boxes(s: &str) -> Result<Vec<TorusBox>, CliError> {
    s.split(';')
        .filter(|b| !b.trim().is_empty())
        .map(|b| {
            let (lo, hi) = b.split_once(':').ok_or_else(|| bad("box", b))?;
            let lo = lo.split(',').map(rational).collect::<Result<Vec<_>, _>>()?;
            let hi = hi.split(',').map(rational).collect::<Result<Vec<_>, _>>()?;
            TorusBox::new(lo, hi).map_err(CliError::from)
        })
        .collect()
}

/// `"1,0,0,1"` or `"1001"`.
pub fn mask(s: &str) -> Result<Vec<bool>, CliError> {
    s.chars()
        .filter(|c| !c.is_whitespace() && *c != ',')
        .map(|c| match c {
            '1' => Ok(true),
            '0' => Ok(false),
            _ => Err(bad("mask", s)),
        })
        .collect()
}

/// `"x1,x2:mass;..."`.
pub fn atoms(s: &str) -> Result<Vec<(Vec<f64>, f64)>, CliError> {
    s.split(';')
        .filter(|a| !a.trim().is_empty())
        .map(|a| {
            let (loc, mass) = a.split_once(':').ok_or_else(|| bad("atom", a))?;
            let mass = mass.trim().parse().map_err(|_| bad("atom mass", a))?;
            Ok((list(loc, "atom location")?, mass))
        })
        .collect()
}

/// `"m1,m2:re,im;..."`.
pub fn density(s: &str) -> Result<BTreeMap<Vec<i64>, Complex64>, CliError> {
    s.split(';')
        .filter(|a| !a.trim().is_empty())
        .map(|a| {
            let (m, c) = a.split_once(':').ok_or_else(|| bad("density coefficient", a))?;
            let c: Vec<f64> = list(c, "density coefficient")?;
            let c = match c.as_slice() {
                [re] => Complex64::new(*re, 0.0),
                [re, im] => Complex64::new(*re, *im),
                _ => return Err(bad("density coefficient", a)),
            };
            Ok((list(m, "density frequency")?, c))
        })
        .collect()
}
