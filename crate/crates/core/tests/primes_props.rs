use num_complex::Complex64;
use primeud::primes::{arith_tables, sieve, vaughan_decompose, PrimeTable};
use primeud::circle;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn is_prime(n: u64) -> bool {
    n >= 2 && (2..).take_while(|d| d * d <= n).all(|d| n % d != 0)
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

#[test]
fn sieve_matches_trial_division_to_1e5() {
    let t = sieve(100_000).unwrap();
    let expected: Vec<u64> = (1..=100_000).filter(|&n| is_prime(n)).collect();
    assert_eq!(t.primes(), &expected[..]);
    assert_eq!(t.pi(100_000), 9592);
}

#[test]
fn segmented_and_cached_tables_agree() {
    let t = sieve(3_000_000).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("p.bin");
    t.save(&path).unwrap();
    let back = PrimeTable::load(&path).unwrap();
    assert_eq!(back, t);
    assert_eq!(PrimeTable::load_or_sieve(&path, 3_000_000).unwrap(), t);
}

/// Pairs are drawn with `m n <= 10^6` so the product stays inside the table.
#[test]
fn mobius_and_phi_are_multiplicative() {
    let a = arith_tables(1_000_000).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut checked = 0;
    while checked < 1000 {
        let m = rng.gen_range(1..=1000u64);
        let n = rng.gen_range(1..=1_000_000 / m);
        if gcd(m, n) != 1 {
            continue;
        }
        assert_eq!(a.mobius(m * n), a.mobius(m) * a.mobius(n), "mu({m} * {n})");
        assert_eq!(a.phi(m * n), a.phi(m) * a.phi(n), "phi({m} * {n})");
        checked += 1;
    }
}

#[test]
fn lambda_squared_window() {
    let a = arith_tables(200_000).unwrap();
    for y in [1_000u64, 10_000, 100_000] {
        let s: f64 = (y..=2 * y).map(|n| a.lambda(n).powi(2)).sum();
        let ratio = s / (y as f64 * (y as f64).ln());
        assert!((0.5..=3.0).contains(&ratio), "y = {y}: {ratio}");
    }
}

#[test]
fn vaughan_identity_randomized() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..50 {
        let x = rng.gen_range(20..=10_000u64);
        let u = rng.gen_range(1..=20);
        let v = rng.gen_range(1..=20);
        let g: Vec<Complex64> = (0..=x.max(u * v)).map(|_| circle(rng.gen())).collect();
        let t = vaughan_decompose(|n| g[n as usize], x, u, v).unwrap();
        assert!(t.residual() / (1.0 + t.lhs.norm()) < 1e-9, "X={x} u={u} v={v}");
    }
}
