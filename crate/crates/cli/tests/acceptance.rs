//! Acceptance gate: one PASS/FAIL line per criterion, non-zero exit on any failure.

use std::time::Instant;

use num_bigint::BigUint;
use num_complex::Complex64;
use num_rational::Rational64;
use primeud::discrepancy::star_discrepancy;
use primeud::ergodic::{
    ergodic_average, lattice_recurrence_scan, torus_recurrence_average, DiagonalUnitarySystem, LatticeSet,
    RecurrenceGenerator, TorusBox, TorusSystem,
};
use primeud::expsums::{erdos_turan_bound, vdc_inequality_check, BoundConstants};
use primeud::primes::{ap_balance_report, sieve, vaughan_decompose};
use primeud::{circle, HardyExpr, PrimeTable};
use primeud_cli::corpus;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const CHUNK: usize = 4096;

fn e(s: &str) -> HardyExpr {
    s.parse().unwrap()
}

fn gen(poly: u32, exprs: &[&str], shift: i64) -> RecurrenceGenerator {
    RecurrenceGenerator::new(poly, exprs.iter().map(|s| e(s)).collect(), None, shift).unwrap()
}

/// Returns `(pass, detail)`.
type Check = fn(&PrimeTable) -> (bool, String);

fn vaughan(_: &PrimeTable) -> (bool, String) {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut worst: f64 = 0.0;
    for _ in 0..50 {
        let x = rng.gen_range(1..=10_000u64);
        let u = rng.gen_range(1..=20u64);
        let v = rng.gen_range(1..=20u64.min(x));
        let top = x.max(u * v) as usize;
        let g: Vec<Complex64> = (0..=top).map(|_| circle(rng.gen())).collect();
        let t = vaughan_decompose(|n| g[n as usize], x, u, v).unwrap();
        worst = worst.max(t.residual() / (1.0 + t.lhs.norm()));
    }
    (worst < 1e-9, format!("50 instances, max |lhs - rhs| / (1 + |lhs|) = {worst:.2e}"))
}

/// Direct O(N^2) count over every anchor `t` in the sample and `t = 1`.
fn brute_star(points: &[f64]) -> f64 {
    let n = points.len() as f64;
    let mut d: f64 = 0.0;
    for &t in points.iter().chain(std::iter::once(&1.0)) {
        let below = points.iter().filter(|&&x| x < t).count() as f64;
        let upto = points.iter().filter(|&&x| x <= t).count() as f64;
        d = d.max((upto / n - t).abs()).max((below / n - t).abs());
    }
    d
}

fn star_oracle(_: &PrimeTable) -> (bool, String) {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut worst: f64 = 0.0;
    for i in 0..20 {
        let n = rng.gen_range(1..=2000);
        let pts: Vec<f64> = (0..n)
            .map(|_| {
                let x: f64 = rng.gen();
                // every fourth sample has heavy ties
                if i % 4 == 0 {
                    (x * 37.0).floor() / 37.0
                } else {
                    x
                }
            })
            .collect();
        worst = worst.max((star_discrepancy(&pts).unwrap() - brute_star(&pts)).abs());
    }
    (worst <= 1e-12, format!("20 samples, max |fast - brute| = {worst:.2e}"))
}

fn structured_phase(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    let a: f64 = rng.gen();
    let b: f64 = rng.gen();
    match rng.gen_range(0..4) {
        0 => (0..n).map(|_| rng.gen()).collect(),
        1 => (0..n).map(|i| i as f64 * a).collect(),
        2 => (0..n).map(|i| (i * i) as f64 * a + i as f64 * b).collect(),
        _ => {
            let w = rng.gen_range(0.0..0.3);
            (0..n).map(|_| a + w * rng.gen::<f64>()).collect()
        }
    }
}

fn vdc_and_et(_: &PrimeTable) -> (bool, String) {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let consts = BoundConstants::default();
    let mut vdc_viol = 0;
    for _ in 0..1000 {
        let n = rng.gen_range(1..=2000);
        let h = rng.gen_range(1..=50);
        let xi: Vec<Complex64> = structured_phase(&mut rng, n).into_iter().map(circle).collect();
        vdc_viol += !vdc_inequality_check(&xi, h).unwrap().holds as usize;
    }
    let mut et_viol = 0;
    for _ in 0..1000 {
        let n = rng.gen_range(1..=2000);
        let q = rng.gen_range(1..=64);
        let pts: Vec<f64> = structured_phase(&mut rng, n).into_iter().map(|x| x - x.floor()).collect();
        let pts: Vec<f64> = pts.into_iter().map(|x| if x >= 1.0 { 0.0 } else { x }).collect();
        et_viol += !erdos_turan_bound(&pts, q, &consts, CHUNK).unwrap().holds as usize;
    }
    (
        vdc_viol == 0 && et_viol == 0,
        format!("van der Corput: {vdc_viol}/1000 violations, Erdos-Turan: {et_viol}/1000 violations"),
    )
}

fn corpus_rows(table: &PrimeTable, positive: bool) -> (bool, String) {
    let report = corpus::run(100_000, table, CHUNK).unwrap();
    let rows: Vec<_> = report.rows.iter().filter(|r| r.expected_ud == positive).collect();
    let detail = rows
        .iter()
        .map(|r| format!("{} {:.4}->{:.4}", r.expr, r.star[0].1, r.star[2].1))
        .collect::<Vec<_>>()
        .join("; ");
    (rows.iter().all(|r| r.criterion), detail)
}

fn positives(t: &PrimeTable) -> (bool, String) {
    corpus_rows(t, true)
}

fn negatives(t: &PrimeTable) -> (bool, String) {
    corpus_rows(t, false)
}

fn ergodic(table: &PrimeTable) -> (bool, String) {
    let phi = 0.618_033_988_749_895;
    let r2 = std::f64::consts::SQRT_2 - 1.0;
    let e2 = std::f64::consts::E - 2.0;
    let cases: Vec<(RecurrenceGenerator, Vec<Vec<f64>>)> = vec![
        (gen(1, &[], 0), vec![vec![phi], vec![0.0]]),
        (gen(1, &[], 1), vec![vec![r2]]),
        (gen(0, &["x^(3/2)"], 0), vec![vec![phi], vec![e2]]),
        (gen(1, &["x^(3/2)"], -1), vec![vec![phi, r2], vec![0.0, 0.0], vec![e2, 0.0]]),
        (gen(2, &["sqrt(2)*x^2"], 1), vec![vec![r2, 0.0, phi]]),
    ];
    let mut worst: f64 = 0.0;
    for (g, freqs) in cases {
        let d = g.generate(100_000, table, CHUNK).unwrap();
        let f = vec![Complex64::new(1.0, 0.0); freqs.len()];
        let sys = DiagonalUnitarySystem::new(freqs, f).unwrap();
        worst = worst.max(ergodic_average(&sys, &d, CHUNK).unwrap().deviation);
    }
    let mut invariant_max: f64 = 0.0;
    for g in [gen(1, &[], 0), gen(1, &["x^(3/2)"], 1)] {
        let d = g.generate(100_000, table, CHUNK).unwrap();
        let sys = DiagonalUnitarySystem::new(vec![vec![0.0; g.dim()]; 2], vec![Complex64::new(0.7, -0.2); 2]).unwrap();
        invariant_max = invariant_max.max(ergodic_average(&sys, &d, CHUNK).unwrap().deviation);
    }
    (
        worst < 0.05 && invariant_max == 0.0,
        format!("max deviation {worst:.4} over 5 systems, invariant systems {invariant_max}"),
    )
}

fn r(n: i64, d: i64) -> Rational64 {
    Rational64::new(n, d)
}

fn torus(table: &PrimeTable) -> (bool, String) {
    let a1 = std::f64::consts::SQRT_2 - 1.0;
    let a2 = 0.618_033_988_749_895;
    let one_d = [
        vec![TorusBox::new(vec![r(0, 1)], vec![r(1, 2)]).unwrap()],
        vec![TorusBox::new(vec![r(1, 8)], vec![r(3, 8)]).unwrap()],
        vec![TorusBox::new(vec![r(1, 3)], vec![r(1, 3) + r(1, 10)]).unwrap()],
    ];
    let two_d = [
        vec![TorusBox::new(vec![r(0, 1), r(0, 1)], vec![r(1, 2), r(1, 1)]).unwrap()],
        vec![
            TorusBox::new(vec![r(0, 1), r(0, 1)], vec![r(1, 4), r(1, 2)]).unwrap(),
            TorusBox::new(vec![r(1, 2), r(1, 2)], vec![r(3, 4), r(1, 1)]).unwrap(),
        ],
        vec![TorusBox::new(vec![r(1, 5), r(1, 3)], vec![r(2, 5), r(5, 6)]).unwrap()],
    ];
    let gens1 = [gen(1, &[], 1), gen(1, &[], -1), gen(0, &["x^(3/2)"], 0)];
    let gens2 = [gen(1, &["x^(3/2)"], 1), gen(0, &["x^(1/2) + log^2", "sqrt(2)*x^(3/2)"], 0)];
    let mut worst = f64::INFINITY;
    let mut count = 0;
    for g in &gens1 {
        let psi = g.generate(100_000, table, CHUNK).unwrap();
        for boxes in &one_d {
            let sys = TorusSystem::new(vec![vec![a1]], boxes.clone()).unwrap();
            worst = worst.min(torus_recurrence_average(&sys, &psi, CHUNK).unwrap().margin);
            count += 1;
        }
    }
    for g in &gens2 {
        let psi = g.generate(100_000, table, CHUNK).unwrap();
        for boxes in &two_d {
            let sys = TorusSystem::new(vec![vec![a1, a2], vec![a2, 0.0]], boxes.clone()).unwrap();
            worst = worst.min(torus_recurrence_average(&sys, &psi, CHUNK).unwrap().margin);
            count += 1;
        }
    }
    (worst >= -0.005, format!("min margin {worst:.5} over {count} systems (mu(A) = 1/2, 1/4, 1/10)"))
}

/// Seeded mask over `period` with exactly `members` cells.
fn random_mask(rng: &mut ChaCha8Rng, period: &[u64], members: usize) -> LatticeSet {
    let cells: usize = period.iter().product::<u64>() as usize;
    let mut mask = vec![false; cells];
    let mut idx: Vec<usize> = (0..cells).collect();
    for i in 0..members {
        let j = rng.gen_range(i..cells);
        idx.swap(i, j);
        mask[idx[i]] = true;
    }
    LatticeSet::new(period.to_vec(), mask).unwrap()
}

fn lattice(table: &PrimeTable) -> (bool, String) {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    // (period, members) per density 1/2, 1/5, 1/10 and dimension
    let shapes: [(Vec<u64>, usize); 9] = [
        (vec![2], 1),
        (vec![10], 2),
        (vec![10], 1),
        (vec![2, 4], 4),
        (vec![5, 5], 5),
        (vec![2, 5], 1),
        (vec![2, 2, 4], 8),
        (vec![5, 2, 2], 4),
        (vec![2, 5, 3], 3),
    ];
    let gens = [
        vec![gen(1, &[], 1), gen(1, &[], -1), gen(0, &["x^(3/2)"], 0)],
        vec![gen(2, &[], 1), gen(1, &["x^(3/2)"], -1)],
        vec![gen(3, &[], -1), gen(1, &["x^(1/2) + log^2", "sqrt(2)*x^(3/2)"], 1)],
    ];
    let mut worst = f64::INFINITY;
    let mut count = 0;
    for (period, members) in &shapes {
        let k = period.len();
        let mut sets = vec![random_mask(&mut rng, period, *members), random_mask(&mut rng, period, *members)];
        if *members * 2 == period.iter().product::<u64>() as usize && k == 1 {
            sets.push(LatticeSet::multiples(2, 1).unwrap());
        }
        for g in &gens[k - 1] {
            let psi = g.generate(10_000, table, CHUNK).unwrap();
            for set in &sets {
                let s = lattice_recurrence_scan(set, &psi).unwrap();
                worst = worst.min(s.hit_density - s.dstar_sq);
                count += 1;
            }
        }
    }
    for (m, k, g) in [(5, 1, gen(1, &[], 1)), (10, 1, gen(1, &[], -1)), (2, 2, gen(2, &[], 1))] {
        let psi = g.generate(10_000, table, CHUNK).unwrap();
        let s = lattice_recurrence_scan(&LatticeSet::multiples(m, k).unwrap(), &psi).unwrap();
        worst = worst.min(s.hit_density - s.dstar_sq);
        count += 1;
    }
    (worst >= -0.02, format!("min hit_density - d*^2 = {worst:.4} over {count} scans"))
}

fn balance(_: &PrimeTable) -> (bool, String) {
    let t = sieve(1_000_000).unwrap();
    let rep = ap_balance_report(&t, 10, 1_000_000).unwrap();
    (rep.max_deviation < 0.05, format!("max deviation {:.5} for q <= 10", rep.max_deviation))
}

/// `{n^(3/2)}` from `floor(sqrt(n^3 10^100))`, i.e. 50 exact decimal digits.
fn frac_oracle(n: u64) -> f64 {
    let scale = BigUint::from(10u32).pow(50);
    let v = BigUint::from(n).pow(3) * &scale * &scale;
    let root = v.sqrt();
    let frac = root % &scale;
    // leading 17 digits are plenty for an f64
    let lead = frac / BigUint::from(10u32).pow(33);
    lead.to_string().parse::<f64>().unwrap() / 1e17
}

fn compensated(_: &PrimeTable) -> (bool, String) {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let f = e("x^(3/2)");
    let mut worst: f64 = 0.0;
    for _ in 0..1000 {
        let n = rng.gen_range(1..=1_000_000_000u64);
        let ours = f.frac_scaled(n as f64, 1).unwrap().frac;
        let d = (ours - frac_oracle(n)).abs();
        worst = worst.max(d.min(1.0 - d));
    }
    (worst < 1e-9, format!("1000 arguments up to 1e9, max error {worst:.2e}"))
}

fn determinism(_: &PrimeTable) -> (bool, String) {
    let argv = ["primeud", "corpus-run", "--N", "100000"];
    let a = primeud_cli::execute(&argv);
    let b = primeud_cli::execute(&argv);
    let c = primeud_cli::execute(&["primeud", "corpus-run", "--N", "100000", "--threads", "2"]);
    let same = a.code == 0 && a.stdout == b.stdout && a.stdout == c.stdout;
    (same, format!("{} bytes, identical across runs and thread counts: {same}", a.stdout.len()))
}

fn main() {
    let table = sieve(2_000_000).unwrap();
    let checks: [(&str, Check); 11] = [
        ("vaughan identity", vaughan),
        ("star discrepancy vs brute force", star_oracle),
        ("van der Corput and Erdos-Turan inequalities", vdc_and_et),
        ("positive controls halve D*", positives),
        ("negative controls keep D* > 0.05", negatives),
        ("diagonal unitary averages", ergodic),
        ("torus recurrence margin", torus),
        ("lattice hit density", lattice),
        ("prime balance in progressions", balance),
        ("compensated fractional parts", compensated),
        ("corpus determinism", determinism),
    ];
    let mut failed = 0;
    for (i, (name, check)) in checks.iter().enumerate() {
        let start = Instant::now();
        let (pass, detail) = check(&table);
        failed += !pass as usize;
        println!(
            "{} {:>2} {name}: {detail} [{:.2}s]",
            if pass { "PASS" } else { "FAIL" },
            i + 1,
            start.elapsed().as_secs_f64()
        );
    }
    println!("acceptance: {} of {} criteria pass", checks.len() - failed, checks.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
