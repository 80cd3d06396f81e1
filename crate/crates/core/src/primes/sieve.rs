use std::collections::BTreeMap;
use std::io::{Read, Write};
use std::path::Path;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};

pub const MAX_SIEVE_LIMIT: u64 = 1 << 40;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct SieveConfig {
    /// Odd numbers per segment; one byte each.
    pub segment_len: usize,
    pub max_limit: u64,
    /// Refuse sieves whose prime list would exceed this many bytes.
    pub max_bytes: u64,
}

impl Default for SieveConfig {
    fn default() -> Self {
        Self {
            segment_len: 1 << 18,
            max_limit: MAX_SIEVE_LIMIT,
            max_bytes: 4 << 30,
        }
    }
}

/// All primes up to `limit`, ascending, with `pi(x)` checkpoints at powers of ten.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PrimeTable {
    limit: u64,
    primes: Vec<u64>,
    pi_checkpoints: BTreeMap<u64, u64>,
}

/// Simple sieve of Eratosthenes for `n <= limit`; used for base primes.
fn small_primes(limit: u64) -> Vec<u64> {
    if limit < 2 {
        return Vec::new();
    }
    let n = limit as usize;
    let mut composite = vec![false; n + 1];
    let mut out = Vec::new();
    for i in 2..=n {
        if !composite[i] {
            out.push(i as u64);
            let mut j = i * i;
            while j <= n {
                composite[j] = true;
                j += i;
            }
        }
    }
    out
}

fn isqrt(n: u64) -> u64 {
    let mut r = (n as f64).sqrt() as u64;
    while r * r > n {
        r -= 1;
    }
    while (r + 1) * (r + 1) <= n {
        r += 1;
    }
    r
}

/// Odd primes in `[lo, hi)` (lo odd), using odd base primes.
fn sieve_segment(lo: u64, hi: u64, base: &[u64]) -> Vec<u64> {
    let len = ((hi - lo) / 2) as usize;
    let mut composite = vec![false; len];
    for &p in base.iter().skip(1) {
        if p * p >= hi {
            break;
        }
        // first odd multiple of p that is >= max(p*p, lo)
        let mut start = (lo.div_ceil(p) * p).max(p * p);
        if start % 2 == 0 {
            start += p;
        }
        let mut idx = ((start - lo) / 2) as usize;
        let step = p as usize;
        while idx < len {
            composite[idx] = true;
            idx += step;
        }
    }
    composite
        .iter()
        .enumerate()
        .filter(|(_, &c)| !c)
        .map(|(i, _)| lo + 2 * i as u64)
        .collect()
}

/// Segmented sieve of Eratosthenes over odd numbers.
///
/// Segments are sieved in parallel and concatenated in ascending order, so the
/// result is identical for every thread count.
pub fn sieve_with(limit: u64, cfg: &SieveConfig) -> Result<PrimeTable> {
    if limit < 2 || limit > cfg.max_limit {
        return Err(Error::InvalidArgument(format!(
            "sieve limit {limit} outside [2, {}]",
            cfg.max_limit
        )));
    }
    let estimate = 1.3 * limit as f64 / (limit as f64).ln().max(1.0) * 8.0;
    if estimate > cfg.max_bytes as f64 {
        return Err(Error::InvalidArgument(format!(
            "sieve to {limit} needs about {estimate:.0} bytes, above the {} byte cap",
            cfg.max_bytes
        )));
    }
    let base = small_primes(isqrt(limit));
    let seg_span = 2 * cfg.segment_len.max(64) as u64;
    let end = limit + 1; // exclusive
    let n_seg = (end - 3).div_ceil(seg_span).max(1);
    let segments: Vec<Vec<u64>> = if end <= 3 {
        Vec::new()
    } else {
        (0..n_seg)
            .into_par_iter()
            .map(|s| {
                let lo = 3 + s * seg_span;
                let hi = (lo + seg_span).min(end + (end % 2 == 0) as u64);
                let hi = if (hi - lo) % 2 == 1 { hi + 1 } else { hi };
                sieve_segment(lo, hi, &base)
                    .into_iter()
                    .filter(|&p| p <= limit)
                    .collect()
            })
            .collect()
    };
    let mut primes = Vec::with_capacity(segments.iter().map(Vec::len).sum::<usize>() + 1);
    primes.push(2);
    for s in segments {
        primes.extend(s);
    }
    Ok(PrimeTable::from_sorted(limit, primes))
}

pub fn sieve(limit: u64) -> Result<PrimeTable> {
    sieve_with(limit, &SieveConfig::default())
}

const CACHE_MAGIC: &[u8; 8] = b"PRIMEUD\0";
const CACHE_VERSION: u32 = 1;

impl PrimeTable {
    fn from_sorted(limit: u64, primes: Vec<u64>) -> Self {
        let mut table = Self {
            limit,
            primes,
            pi_checkpoints: BTreeMap::new(),
        };
        let mut x = 10u64;
        while x <= limit {
            table.pi_checkpoints.insert(x, table.pi(x));
            x = match x.checked_mul(10) {
                Some(v) => v,
                None => break,
            };
        }
        table.pi_checkpoints.insert(limit, table.primes.len() as u64);
        table
    }

    pub fn limit(&self) -> u64 {
        self.limit
    }

    pub fn primes(&self) -> &[u64] {
        &self.primes
    }

    pub fn len(&self) -> usize {
        self.primes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.primes.is_empty()
    }

    pub fn pi_checkpoints(&self) -> &BTreeMap<u64, u64> {
        &self.pi_checkpoints
    }

    /// Number of primes `<= x`; saturates at `pi(limit)`.
    pub fn pi(&self, x: u64) -> u64 {
        self.primes.partition_point(|&p| p <= x) as u64
    }

    pub fn contains(&self, n: u64) -> bool {
        self.primes.binary_search(&n).is_ok()
    }

    /// The first `n` primes, or an error if the table holds fewer.
    pub fn first(&self, n: usize) -> Result<&[u64]> {
        self.primes.get(..n).ok_or_else(|| Error::TableTooSmall {
            needed: format!("{n} primes"),
            available: format!("{} primes up to {}", self.primes.len(), self.limit),
        })
    }

    /// Primes `<= x`, or an error if `x` exceeds the sieve limit.
    pub fn up_to(&self, x: u64) -> Result<&[u64]> {
        if x > self.limit {
            return Err(Error::TableTooSmall {
                needed: format!("primes up to {x}"),
                available: format!("limit {}", self.limit),
            });
        }
        Ok(&self.primes[..self.pi(x) as usize])
    }

    /// Write the table as `{magic, version, limit}` followed by little-endian u64 gaps.
    pub fn write_cache<W: Write>(&self, mut w: W) -> Result<()> {
        let io = |e: std::io::Error| Error::Cache(e.to_string());
        w.write_all(CACHE_MAGIC).map_err(io)?;
        w.write_all(&CACHE_VERSION.to_le_bytes()).map_err(io)?;
        w.write_all(&self.limit.to_le_bytes()).map_err(io)?;
        let mut prev = 0u64;
        let mut buf = Vec::with_capacity(self.primes.len() * 8);
        for &p in &self.primes {
            buf.extend_from_slice(&(p - prev).to_le_bytes());
            prev = p;
        }
        w.write_all(&buf).map_err(io)
    }

    pub fn read_cache<R: Read>(mut r: R) -> Result<Self> {
        let io = |e: std::io::Error| Error::Cache(e.to_string());
        let mut magic = [0u8; 8];
        r.read_exact(&mut magic).map_err(io)?;
        if &magic != CACHE_MAGIC {
            return Err(Error::Cache("bad magic".into()));
        }
        let mut v = [0u8; 4];
        r.read_exact(&mut v).map_err(io)?;
        let version = u32::from_le_bytes(v);
        if version != CACHE_VERSION {
            return Err(Error::Cache(format!("unsupported version {version}")));
        }
        let mut l = [0u8; 8];
        r.read_exact(&mut l).map_err(io)?;
        let limit = u64::from_le_bytes(l);
        let mut body = Vec::new();
        r.read_to_end(&mut body).map_err(io)?;
        if body.len() % 8 != 0 {
            return Err(Error::Cache("truncated delta stream".into()));
        }
        let mut primes = Vec::with_capacity(body.len() / 8);
        let mut acc = 0u64;
        for chunk in body.chunks_exact(8) {
            let d = u64::from_le_bytes(chunk.try_into().unwrap());
            if d == 0 {
                return Err(Error::Cache("zero gap".into()));
            }
            acc = acc.checked_add(d).ok_or_else(|| Error::Cache("gap overflow".into()))?;
            primes.push(acc);
        }
        if primes.last().is_some_and(|&p| p > limit) {
            return Err(Error::Cache("prime beyond recorded limit".into()));
        }
        Ok(Self::from_sorted(limit, primes))
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let f = std::fs::File::create(path).map_err(|e| Error::Cache(e.to_string()))?;
        self.write_cache(std::io::BufWriter::new(f))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let f = std::fs::File::open(path).map_err(|e| Error::Cache(e.to_string()))?;
        Self::read_cache(std::io::BufReader::new(f))
    }

    /// Load the cache at `path` if it covers `limit`, otherwise sieve and save it.
    pub fn load_or_sieve(path: &Path, limit: u64) -> Result<Self> {
        if let Ok(t) = Self::load(path) {
            if t.limit >= limit {
                return Ok(t);
            }
        }
        let t = sieve(limit)?;
        t.save(path)?;
        Ok(t)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn trial_division(n: u64) -> bool {
        n >= 2 && (2..).take_while(|d| d * d <= n).all(|d| n % d != 0)
    }

    #[test]
    fn small_limits() {
        assert_eq!(sieve(10).unwrap().primes(), &[2, 3, 5, 7]);
        assert_eq!(sieve(2).unwrap().primes(), &[2]);
        assert_eq!(sieve(3).unwrap().primes(), &[2, 3]);
        assert_eq!(sieve(4).unwrap().primes(), &[2, 3]);
        assert!(sieve(1).is_err());
        assert!(sieve(MAX_SIEVE_LIMIT + 1).is_err());
    }

    #[test]
    fn agrees_with_trial_division() {
        let cfg = SieveConfig {
            segment_len: 100,
            ..SieveConfig::default()
        };
        for limit in [97, 100, 101, 1000, 10_000] {
            let t = sieve_with(limit, &cfg).unwrap();
            let expected: Vec<u64> = (2..=limit).filter(|&n| trial_division(n)).collect();
            assert_eq!(t.primes(), expected.as_slice(), "limit {limit}");
        }
        let t = sieve(10_000).unwrap();
        assert_eq!(t.pi(10_000), (2..=10_000).filter(|&n| trial_division(n)).count() as u64);
        assert_eq!(t.pi_checkpoints()[&1000], 168);
    }

    #[test]
    fn memory_cap_enforced() {
        let cfg = SieveConfig {
            max_bytes: 1000,
            ..SieveConfig::default()
        };
        assert!(sieve_with(1_000_000, &cfg).is_err());
    }

    #[test]
    fn cache_roundtrip_and_validation() {
        let t = sieve(5000).unwrap();
        let mut buf = Vec::new();
        t.write_cache(&mut buf).unwrap();
        assert_eq!(&buf[..8], CACHE_MAGIC);
        assert_eq!(u64::from_le_bytes(buf[12..20].try_into().unwrap()), 5000);
        assert_eq!(u64::from_le_bytes(buf[20..28].try_into().unwrap()), 2);
        assert_eq!(PrimeTable::read_cache(buf.as_slice()).unwrap(), t);
        let mut bad = buf.clone();
        bad[0] = b'X';
        assert!(PrimeTable::read_cache(bad.as_slice()).is_err());
        assert!(PrimeTable::read_cache(&buf[..buf.len() - 3]).is_err());
    }

    #[test]
    fn accessors() {
        let t = sieve(100).unwrap();
        assert_eq!(t.first(3).unwrap(), &[2, 3, 5]);
        assert!(t.first(26).is_err());
        assert_eq!(t.up_to(20).unwrap().len(), 8);
        assert!(t.up_to(101).is_err());
        assert!(t.contains(97) && !t.contains(91));
    }
}
