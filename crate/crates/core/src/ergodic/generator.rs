use serde::Serialize;

use crate::error::{Error, Result};
use crate::hardy::HardyExpr;
use crate::parallel::chunked;
use crate::primes::PrimeTable;

/// Integer vectors `d_1, ..., d_N` indexed by the first `N` primes.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct IndexVectors {
    pub dim: usize,
    pub vectors: Vec<Vec<i128>>,
    pub boundary_events: u64,
}

impl IndexVectors {
    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }
}

/// `d_n = ([xi_1(p_n)], ..., [xi_k(p_n)])` with the boundary tie-break of
/// [`HardyExpr::floor_at`].
pub fn prime_index_sequence(exprs: &[HardyExpr], n: usize, table: &PrimeTable, chunk: usize) -> Result<IndexVectors> {
    RecurrenceGenerator::new(0, exprs.to_vec(), None, 0)?.generate(n, table, chunk)
}

/// `psi(p) = L (p+s, (p+s)^2, ..., (p+s)^l, [xi_1(p)], ..., [xi_k(p)])`.
///
/// The shift `s` in {-1, 0, 1} applies to the polynomial coordinates only;
/// `L` defaults to the identity.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RecurrenceGenerator {
    pub poly_degree: u32,
    #[serde(serialize_with = "ser_exprs")]
    pub exprs: Vec<HardyExpr>,
    pub l_matrix: Option<Vec<Vec<i64>>>,
    pub shift: i64,
}

fn ser_exprs<S: serde::Serializer>(exprs: &[HardyExpr], s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_seq(exprs.iter().map(|e| e.to_string()))
}

impl RecurrenceGenerator {
    pub fn new(poly_degree: u32, exprs: Vec<HardyExpr>, l_matrix: Option<Vec<Vec<i64>>>, shift: i64) -> Result<Self> {
        if !(-1..=1).contains(&shift) {
            return Err(Error::InvalidArgument(format!("shift {shift} not in {{-1, 0, 1}}")));
        }
        if poly_degree > 4 {
            return Err(Error::InvalidArgument(format!("polynomial degree {poly_degree} above 4")));
        }
        let inner = poly_degree as usize + exprs.len();
        if inner == 0 {
            return Err(Error::Empty("generator has no coordinates".into()));
        }
        if let Some(l) = &l_matrix {
            if l.is_empty() || l.iter().any(|row| row.len() != inner) {
                return Err(Error::Dimension(format!("L must be m x {inner}")));
            }
            if l.iter().all(|row| row.iter().all(|&c| c == 0)) {
                return Err(Error::InvalidArgument("L must be non-zero".into()));
            }
        }
        Ok(Self {
            poly_degree,
            exprs,
            l_matrix,
            shift,
        })
    }

    /// Output dimension `m`.
    pub fn dim(&self) -> usize {
        match &self.l_matrix {
            Some(l) => l.len(),
            None => self.poly_degree as usize + self.exprs.len(),
        }
    }

    fn raw(&self, p: u64) -> Result<(Vec<i128>, bool)> {
        let mut out = Vec::with_capacity(self.poly_degree as usize + self.exprs.len());
        let base = p as i128 + self.shift as i128;
        let mut pow = 1i128;
        for _ in 0..self.poly_degree {
            pow = pow
                .checked_mul(base)
                .ok_or_else(|| Error::Overflow { magnitude: base as f64 })?;
            out.push(pow);
        }
        let mut boundary = false;
        for e in &self.exprs {
            let (fl, b) = e.floor_at(p as f64)?;
            boundary |= b;
            out.push(fl as i128);
        }
        Ok((out, boundary))
    }

    fn apply(&self, raw: Vec<i128>) -> Result<Vec<i128>> {
        match &self.l_matrix {
            None => Ok(raw),
            Some(l) => l
                .iter()
                .map(|row| {
                    row.iter().zip(&raw).try_fold(0i128, |acc, (&c, &v)| {
                        (c as i128)
                            .checked_mul(v)
                            .and_then(|t| acc.checked_add(t))
                            .ok_or(Error::Overflow { magnitude: v as f64 })
                    })
                })
                .collect(),
        }
    }

    /// `psi(p_1), ..., psi(p_n)`.
    pub fn generate(&self, n: usize, table: &PrimeTable, chunk: usize) -> Result<IndexVectors> {
        let primes = table.first(n)?;
        let parts = chunked(n, chunk, |range| {
            let mut vs = Vec::with_capacity(range.len());
            let mut events = 0u64;
            for &p in &primes[range] {
                let (raw, b) = self.raw(p)?;
                events += b as u64;
                vs.push(self.apply(raw)?);
            }
            Ok((vs, events))
        })?;
        let mut vectors = Vec::with_capacity(n);
        let mut boundary_events = 0;
        for (vs, ev) in parts {
            vectors.extend(vs);
            boundary_events += ev;
        }
        Ok(IndexVectors {
            dim: self.dim(),
            vectors,
            boundary_events,
        })
    }
}
