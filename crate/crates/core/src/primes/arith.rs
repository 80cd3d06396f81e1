use crate::error::{Error, Result};

/// Largest limit accepted by [`arith_tables`]; about 2 GB of tables.
pub const MAX_ARITH_LIMIT: u64 = 1 << 28;

/// Von Mangoldt, Moebius and Euler totient values for `0..=limit`.
///
/// Index 0 holds placeholder zeros. `lambda_base[n]` is `p` when `n = p^k`,
/// else 0, so prime-power membership is an integer lookup.
#[derive(Clone, Debug)]
pub struct ArithTables {
    limit: u64,
    mobius: Vec<i8>,
    phi: Vec<u64>,
    lambda_base: Vec<u32>,
}

/// Linear sieve over `2..=limit`.
pub fn arith_tables(limit: u64) -> Result<ArithTables> {
    if limit < 2 || limit > MAX_ARITH_LIMIT {
        return Err(Error::InvalidArgument(format!(
            "arith table limit {limit} outside [2, {MAX_ARITH_LIMIT}]"
        )));
    }
    let n = limit as usize;
    let mut mobius = vec![0i8; n + 1];
    let mut phi = vec![0u64; n + 1];
    let mut lambda_base = vec![0u32; n + 1];
    // smallest prime factor, and the part of n made of that factor
    let mut spf = vec![0u32; n + 1];
    let mut spf_pow = vec![0u32; n + 1];
    let mut primes: Vec<u32> = Vec::new();
    mobius[1] = 1;
    phi[1] = 1;
    for i in 2..=n {
        if spf[i] == 0 {
            spf[i] = i as u32;
            spf_pow[i] = i as u32;
            primes.push(i as u32);
            mobius[i] = -1;
            phi[i] = i as u64 - 1;
            lambda_base[i] = i as u32;
        }
        for &p in &primes {
            let m = i * p as usize;
            if p > spf[i] || m > n {
                break;
            }
            spf[m] = p;
            if p == spf[i] {
                spf_pow[m] = spf_pow[i] * p;
                mobius[m] = 0;
                phi[m] = phi[i] * p as u64;
                // m = p^k exactly when i is itself a power of p
                if spf_pow[i] as usize == i {
                    lambda_base[m] = p;
                }
            } else {
                spf_pow[m] = p;
                mobius[m] = -mobius[i];
                phi[m] = phi[i] * (p as u64 - 1);
            }
        }
    }
    Ok(ArithTables {
        limit,
        mobius,
        phi,
        lambda_base,
    })
}

impl ArithTables {
    pub fn limit(&self) -> u64 {
        self.limit
    }

    fn idx(&self, n: u64) -> usize {
        assert!(n >= 1 && n <= self.limit, "{n} outside table range 1..={}", self.limit);
        n as usize
    }

    pub fn mobius(&self, n: u64) -> i8 {
        self.mobius[self.idx(n)]
    }

    pub fn phi(&self, n: u64) -> u64 {
        self.phi[self.idx(n)]
    }

    /// `p` if `n = p^k` with `k >= 1`, else `None`.
    pub fn prime_power_base(&self, n: u64) -> Option<u64> {
        match self.lambda_base[self.idx(n)] {
            0 => None,
            p => Some(p as u64),
        }
    }

    pub fn lambda(&self, n: u64) -> f64 {
        self.prime_power_base(n).map_or(0.0, |p| (p as f64).ln())
    }
}
