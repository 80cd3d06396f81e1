use std::collections::BTreeMap;

use num_complex::Complex64;
use primeud::discrepancy::{
    checkpoint_rows, discrepancy_report, fractional_parts, rows_to_csv, rows_to_plotdata, Domain, ReportOptions,
    Source,
};
use primeud::ergodic::{
    ergodic_average, fcplus_probe, filtered_recurrence, lattice_recurrence_scan, predicted_filter_density,
    torus_recurrence_average, DiagonalUnitarySystem, IndexVectors, LatticeSet, RecurrenceGenerator,
    RecurrenceTarget, SpectralMeasure, TorusSystem,
};
use primeud::expsums::{
    composite_bound_eval, erdos_turan_bound, kusmin_landau_check, vdc_inequality_check, weyl_sum_integers,
    weyl_sum_primes_range, weyl_sum_values, BoundConstants, BoundReport, CompositeOverrides, SumConfig,
};
use primeud::hardy::boshernitzan_condition;
use primeud::primes::{ap_balance_report, vaughan_decompose};
use primeud::{circle, PrimeTable};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::json;

use crate::args::*;
use crate::{auto_limit, corpus, literals, prime_table, Assertion, CliError, Outcome};

pub fn dispatch(cli: &Cli) -> Result<Outcome, CliError> {
    let c = &cli.common;
    match &cli.command {
        Command::Sieve(a) => sieve_cmd(c, a),
        Command::UdTest(a) => ud_test(c, a),
        Command::WeylSum(a) => weyl_sum(c, a),
        Command::VaughanCheck(a) => vaughan(a),
        Command::BoundCheck(a) => bound_check(c, a),
        Command::ErgodicAverage(a) => ergodic(c, a),
        Command::RecurrenceScan(a) => recurrence(c, a),
        Command::FcplusProbe(a) => fcplus(c, a),
        Command::CorpusRun(a) => {
            let table = prime_table(c, auto_limit(a.n, Domain::Primes))?;
            let report = corpus::run(a.n, &table, c.chunk)?;
            let all = report.all_pass;
            Ok(Outcome::json(&report)?
                .with_table(Some(&table))
                .assert(Assertion::new("corpus", all, format!("{} of {} rows pass", report.passed, report.rows.len()))))
        }
    }
}

fn sum_config(c: &Common) -> SumConfig {
    SumConfig {
        chunk_size: c.chunk,
        ..SumConfig::default()
    }
}

fn table_for(c: &Common, domain: Domain, n: usize) -> Result<Option<PrimeTable>, CliError> {
    if domain.needs_primes() {
        Ok(Some(prime_table(c, auto_limit(n, domain))?))
    } else {
        Ok(None)
    }
}

/// Decades `10, 100, ...` below `n`, then `n`.
fn default_checkpoints(n: usize) -> Vec<usize> {
    let mut v: Vec<usize> = std::iter::successors(Some(10usize), |x| x.checked_mul(10))
        .take_while(|&x| x < n)
        .collect();
    v.push(n);
    v
}

fn sieve_cmd(c: &Common, a: &SieveArgs) -> Result<Outcome, CliError> {
    let table = prime_table(
        &Common {
            table_limit: Some(a.limit),
            ..c.clone()
        },
        a.limit,
    )?;
    let balance = a.q_max.map(|q| ap_balance_report(&table, q, a.limit)).transpose()?;
    Ok(Outcome::json(&json!({
        "limit": table.limit(),
        "pi": table.len(),
        "pi_checkpoints": table.pi_checkpoints(),
        "largest_prime": table.primes().last(),
        "balance": balance,
    }))?
    .with_table(Some(&table)))
}

fn ud_test(c: &Common, a: &UdTestArgs) -> Result<Outcome, CliError> {
    let table = table_for(c, a.domain, a.n)?;
    let opts = ReportOptions {
        et_q: a.et_q,
        chunk: c.chunk,
        ..ReportOptions::default()
    };
    let stream = fractional_parts(&a.expr, a.q, a.domain, a.n, table.as_ref(), c.chunk)?;
    let source = Source {
        expr: a.expr.to_string(),
        q: a.q,
        domain: a.domain,
        first_arg: stream.args[0],
        last_arg: *stream.args.last().unwrap(),
    };
    let report = discrepancy_report(&stream, source, &opts)?;
    let checkpoints = a.checkpoints.clone().unwrap_or_else(|| default_checkpoints(a.n));
    let rows = checkpoint_rows(&stream, &checkpoints, &opts)?;
    let d = report.extreme.unwrap_or(report.star);
    let et = Assertion::new(
        "erdos_turan_dominates",
        report.et_bound >= d,
        format!("et_bound {} vs discrepancy {d}", report.et_bound),
    );
    let mut out = Outcome::json(&json!({
        "report": report,
        "max_weyl_q10": report.max_weyl(),
        "boshernitzan": boshernitzan_condition(&a.expr).ok(),
        "checkpoints": rows,
    }))?
    .with_table(table.as_ref())
    .assert(et);
    out.rows = Some((rows_to_csv(&rows), rows_to_plotdata(&rows)));
    Ok(out)
}

fn weyl_sum(c: &Common, a: &WeylSumArgs) -> Result<Outcome, CliError> {
    let cfg = sum_config(c);
    let (result, table) = match (a.n, a.from, a.to) {
        (Some(n), None, None) => {
            let table = table_for(c, a.domain, n)?;
            let args = a.domain.first(n, table.as_ref())?;
            (weyl_sum_values(&a.expr, a.q, &args, &cfg)?, table)
        }
        (None, from, Some(to)) => match a.domain {
            Domain::Integers => (weyl_sum_integers(&a.expr, a.q, from.unwrap_or(1), to, &cfg)?, None),
            Domain::Primes => {
                let table = prime_table(c, to.max(2))?;
                (weyl_sum_primes_range(&a.expr, a.q, from.unwrap_or(0), to, &table, &cfg)?, Some(table))
            }
            Domain::PrimesInAp { modulus, residue } => {
                let table = prime_table(c, to.max(2))?;
                let x0 = from.unwrap_or(0);
                let args: Vec<u64> = table
                    .up_to(to)?
                    .iter()
                    .copied()
                    .filter(|&p| p > x0 && p % modulus == residue)
                    .collect();
                (weyl_sum_values(&a.expr, a.q, &args, &cfg)?, Some(table))
            }
        },
        _ => {
            return Err(CliError::Validation(
                "weyl-sum needs either --N or --to (with optional --from), not both".into(),
            ))
        }
    };
    Ok(Outcome::json(&json!({
        "expr": a.expr.to_string(),
        "q": a.q,
        "domain": a.domain,
        "sum": result.sum,
        "modulus": result.sum.norm(),
        "count": result.count,
        "normalized": result.normalized,
    }))?
    .with_table(table.as_ref()))
}

fn vaughan(a: &VaughanArgs) -> Result<Outcome, CliError> {
    let phase = &a.phase;
    // Errors cannot escape the closure, so evaluate the phase once up front.
    let values: Vec<Complex64> = (0..=a.x.max(a.u * a.v))
        .map(|n| if n == 0 { Ok(Complex64::new(0.0, 0.0)) } else { phase.phase(n as f64, 1).map(circle) })
        .collect::<Result<_, _>>()?;
    let t = vaughan_decompose(|n| values[n as usize], a.x, a.u, a.v)?;
    let diff = t.residual();
    let normalized = diff / (1.0 + t.lhs.norm());
    Ok(Outcome::json(&json!({
        "X": a.x,
        "u": a.u,
        "v": a.v,
        "phase": phase.to_string(),
        "lhs": t.lhs,
        "t1": t.t1,
        "t2": t.t2,
        "t3": t.t3,
        "rhs": t.rhs(),
        "diff": diff,
        "normalized_diff": normalized,
    }))?
    .assert(Assertion::new(
        "vaughan_identity",
        normalized < 1e-9,
        format!("|lhs - rhs| / (1 + |lhs|) = {normalized:e}"),
    )))
}

#[derive(Serialize)]
struct BoundJson<'a> {
    op: &'static str,
    params: serde_json::Value,
    actual: f64,
    bound: f64,
    ratio: f64,
    holds: bool,
    valid: bool,
    details: &'a BTreeMap<String, f64>,
    note: &'a Option<String>,
    chunk_size: usize,
    precision_mode: &'static str,
}

fn bound_json<'a>(op: &'static str, params: serde_json::Value, r: &'a BoundReport, chunk: usize) -> BoundJson<'a> {
    BoundJson {
        op,
        params,
        actual: r.actual,
        bound: r.bound,
        ratio: r.ratio,
        holds: r.holds,
        valid: r.valid,
        details: &r.details,
        note: &r.note,
        chunk_size: chunk,
        precision_mode: "compensated",
    }
}

fn need<T: Copy>(v: Option<T>, flag: &str, kind: &str) -> Result<T, CliError> {
    v.ok_or_else(|| CliError::Validation(format!("bound-check --kind {kind} needs {flag}")))
}

/// Random trials of a bound: each returns a report; all must hold.
fn trials<F>(op: &'static str, a: &BoundArgs, c: &Common, mut one: F) -> Result<Outcome, CliError>
where
    F: FnMut(&mut ChaCha8Rng) -> Result<BoundReport, CliError>,
{
    if a.trials == 0 {
        return Err(CliError::Validation("--trials must be >= 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(c.seed);
    let mut violations = 0usize;
    let mut worst: Option<BoundReport> = None;
    for _ in 0..a.trials {
        let r = one(&mut rng)?;
        violations += !r.holds as usize;
        if worst.as_ref().map_or(true, |w| r.ratio > w.ratio) {
            worst = Some(r);
        }
    }
    let worst = worst.unwrap();
    let params = json!({"N": a.n, "H": a.h, "et_q": a.et_q, "trials": a.trials, "seed": c.seed});
    Ok(Outcome::json(&json!({
        "trials": a.trials,
        "violations": violations,
        "worst": bound_json(op, params, &worst, c.chunk),
    }))?
    .assert(Assertion::new(op, violations == 0, format!("{violations} violations in {} trials", a.trials))))
}

/// Random points in [0, 1): uniform, or clustered near a random centre.
fn random_points(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    let width: f64 = if rng.gen_bool(0.5) { 1.0 } else { rng.gen_range(0.01..0.5) };
    let centre: f64 = rng.gen();
    (0..n)
        .map(|_| {
            let x = centre + width * rng.gen::<f64>();
            x - x.floor()
        })
        .collect()
}

fn bound_check(c: &Common, a: &BoundArgs) -> Result<Outcome, CliError> {
    let cfg = sum_config(c);
    let consts = BoundConstants::default();
    match a.kind {
        BoundKind::KusminLandau => {
            let kind = "kusmin-landau";
            let expr = need(a.expr.as_ref(), "--expr", kind)?;
            let (from, to) = (need(a.from, "--from", kind)?, need(a.to, "--to", kind)?);
            let r = kusmin_landau_check(expr, a.q, from, to, &consts, &cfg)?;
            let params = json!({"expr": expr.to_string(), "q": a.q, "from": from, "to": to});
            let assertion = Assertion::new(
                "kusmin_landau",
                !r.valid || r.holds,
                format!("actual {} vs bound {} (hypotheses verified: {})", r.actual, r.bound, r.valid),
            );
            Ok(Outcome::json(&bound_json("kusmin_landau", params, &r, c.chunk))?.assert(assertion))
        }
        BoundKind::Composite => {
            let kind = "composite";
            let expr = need(a.expr.as_ref(), "--expr", kind)?;
            let (x1, x) = (need(a.x1, "--X1", kind)?, need(a.x, "--X", kind)?);
            let ov = CompositeOverrides {
                lambda: a.lambda,
                alpha: a.alpha,
            };
            let r = composite_bound_eval(expr, a.q, a.k, x1, x, ov, &consts, &cfg)?;
            let params = json!({"expr": expr.to_string(), "q": a.q, "k": a.k, "X1": x1, "X": x});
            Ok(Outcome::json(&bound_json("composite_bound", params, &r, c.chunk))?)
        }
        BoundKind::Vdc => match &a.expr {
            Some(expr) => {
                let table = table_for(c, a.domain, a.n)?;
                let args = a.domain.first(a.n, table.as_ref())?;
                let xi: Vec<Complex64> = args
                    .iter()
                    .map(|&n| expr.phase(n as f64, a.q).map(circle))
                    .collect::<Result<_, _>>()?;
                let r = vdc_inequality_check(&xi, a.h)?;
                let params = json!({"expr": expr.to_string(), "q": a.q, "domain": a.domain, "N": a.n, "H": a.h});
                let holds = r.holds;
                Ok(Outcome::json(&bound_json("vdc_inequality", params, &r, c.chunk))?
                    .with_table(table.as_ref())
                    .assert(Assertion::new("vdc_inequality", holds, format!("actual {} vs bound {}", r.actual, r.bound))))
            }
            None => trials("vdc_inequality", a, c, |rng| {
                let n = rng.gen_range(1..=a.n);
                let h = rng.gen_range(1..=a.h.max(1));
                let xi: Vec<Complex64> = (0..n).map(|_| circle(rng.gen())).collect();
                Ok(vdc_inequality_check(&xi, h)?)
            }),
        },
        BoundKind::ErdosTuran => match &a.expr {
            Some(expr) => {
                let table = table_for(c, a.domain, a.n)?;
                let stream = fractional_parts(expr, a.q, a.domain, a.n, table.as_ref(), c.chunk)?;
                let r = erdos_turan_bound(&stream.points, a.et_q, &consts, c.chunk)?;
                let params = json!({"expr": expr.to_string(), "q": a.q, "domain": a.domain, "N": a.n, "et_q": a.et_q});
                let holds = r.holds;
                Ok(Outcome::json(&bound_json("erdos_turan", params, &r, c.chunk))?
                    .with_table(table.as_ref())
                    .assert(Assertion::new("erdos_turan", holds, format!("actual {} vs bound {}", r.actual, r.bound))))
            }
            None => trials("erdos_turan", a, c, |rng| {
                let n = rng.gen_range(1..=a.n);
                let q = rng.gen_range(1..=a.et_q.max(1));
                Ok(erdos_turan_bound(&random_points(rng, n), q, &consts, c.chunk)?)
            }),
        },
    }
}

fn generator(g: &GeneratorArgs) -> Result<RecurrenceGenerator, CliError> {
    let l = g.l.as_deref().map(|s| literals::matrix::<i64>(s, "L matrix")).transpose()?;
    Ok(RecurrenceGenerator::new(g.poly_degree, g.exprs.clone(), l, g.shift)?)
}

fn generate(c: &Common, g: &GeneratorArgs, n: usize) -> Result<(RecurrenceGenerator, IndexVectors, PrimeTable), CliError> {
    let gen = generator(g)?;
    let table = prime_table(c, auto_limit(n, Domain::Primes))?;
    let psi = gen.generate(n, &table, c.chunk)?;
    Ok((gen, psi, table))
}

fn prefix(psi: &IndexVectors, n: usize) -> Result<IndexVectors, CliError> {
    if n == 0 || n > psi.len() {
        return Err(CliError::Validation(format!("checkpoint {n} outside 1..={}", psi.len())));
    }
    Ok(IndexVectors {
        dim: psi.dim,
        vectors: psi.vectors[..n].to_vec(),
        boundary_events: psi.boundary_events,
    })
}

fn ergodic(c: &Common, a: &ErgodicArgs) -> Result<Outcome, CliError> {
    let (gen, psi, table) = generate(c, &a.generator, a.n)?;
    let freqs = literals::matrix::<f64>(&a.freqs, "frequency matrix")?;
    let f: Vec<Complex64> = match &a.f {
        Some(v) => v.iter().map(|&x| Complex64::new(x, 0.0)).collect(),
        None => vec![Complex64::new(1.0, 0.0); freqs.len()],
    };
    let sys = DiagonalUnitarySystem::new(freqs, f)?;
    let checkpoints = a.checkpoints.clone().unwrap_or_else(|| default_checkpoints(a.n));
    let rows = checkpoints
        .iter()
        .map(|&n| Ok(ergodic_average(&sys, &prefix(&psi, n)?, c.chunk)?))
        .collect::<Result<Vec<_>, CliError>>()?;
    let last = ergodic_average(&sys, &psi, c.chunk)?;
    let mut out = Outcome::json(&json!({
        "generator": gen,
        "boundary_events": psi.boundary_events,
        "checkpoints": rows,
        "final": last,
    }))?
    .with_table(Some(&table));
    if let Some(max) = a.max_deviation {
        out = out.assert(Assertion::new(
            "ergodic_deviation",
            last.deviation < max,
            format!("deviation {} vs max {max}", last.deviation),
        ));
    }
    Ok(out)
}

fn recurrence(c: &Common, a: &RecurrenceArgs) -> Result<Outcome, CliError> {
    let (gen, psi, table) = generate(c, &a.generator, a.n)?;
    let predicted = |r: u64| predicted_filter_density(&gen, r).ok();
    let (scan, filters, margin) = match a.target {
        Target::Torus => {
            let alphas = a.alphas.as_deref().ok_or_else(|| CliError::Validation("torus target needs --alphas".into()))?;
            let boxes = a.boxes.as_deref().ok_or_else(|| CliError::Validation("torus target needs --boxes".into()))?;
            let sys = TorusSystem::new(literals::matrix(alphas, "rotation matrix")?, literals::boxes(boxes)?)?;
            let r = torus_recurrence_average(&sys, &psi, c.chunk)?;
            let filters = a
                .filter
                .iter()
                .map(|&r| Ok(json!({"result": filtered_recurrence(RecurrenceTarget::Torus(&sys), r, &psi)?, "predicted_density": predicted(r)})))
                .collect::<Result<Vec<_>, CliError>>()?;
            let margin = r.margin;
            (json!({"system": sys, "mu_a": sys.mu_a().to_string(), "average": r}), filters, margin)
        }
        Target::Lattice => {
            let k = psi.dim;
            let set = match (a.multiples, &a.period, &a.mask) {
                (Some(m), None, None) => LatticeSet::multiples(m, k)?,
                (None, Some(p), Some(mask)) => LatticeSet::new(p.clone(), literals::mask(mask)?)?,
                _ => {
                    return Err(CliError::Validation(
                        "lattice target needs either --multiples or both --period and --mask".into(),
                    ))
                }
            };
            let r = lattice_recurrence_scan(&set, &psi)?;
            let filters = a
                .filter
                .iter()
                .map(|&r| Ok(json!({"result": filtered_recurrence(RecurrenceTarget::Lattice(&set), r, &psi)?, "predicted_density": predicted(r)})))
                .collect::<Result<Vec<_>, CliError>>()?;
            let margin = r.hit_density - r.dstar_sq;
            (json!({"density": set.density().to_string(), "scan": r}), filters, margin)
        }
    };
    let mut out = Outcome::json(&json!({
        "target": a.target,
        "generator": gen,
        "boundary_events": psi.boundary_events,
        "recurrence": scan,
        "margin": margin,
        "filters": filters,
    }))?
    .with_table(Some(&table));
    if let Some(min) = a.min_margin {
        out = out.assert(Assertion::new("recurrence_margin", margin >= min, format!("margin {margin} vs min {min}")));
    }
    Ok(out)
}

fn fcplus(c: &Common, a: &FcplusArgs) -> Result<Outcome, CliError> {
    let (gen, psi, table) = generate(c, &a.generator, a.n)?;
    let k = psi.dim;
    let atoms = a.atoms.as_deref().map(literals::atoms).transpose()?.unwrap_or_default();
    let mut density = a.density.as_deref().map(literals::density).transpose()?.unwrap_or_default();
    if a.lebesgue {
        *density.entry(vec![0; k]).or_default() += Complex64::new(1.0, 0.0);
    }
    if atoms.is_empty() && density.is_empty() {
        return Err(CliError::Validation("fcplus-probe needs --atoms, --density or --lebesgue".into()));
    }
    let measure = json!({
        "atoms": atoms,
        "density": density.iter().map(|(m, c)| json!({"frequency": m, "coefficient": c})).collect::<Vec<_>>(),
    });
    let sigma = SpectralMeasure::new(k, atoms, density)?;
    let probe = fcplus_probe(&sigma, &psi)?;
    let holds = probe.mass_at_zero <= probe.final_tail_max + 0.01;
    let detail = format!("sigma({{0}}) = {} vs tail max {}", probe.mass_at_zero, probe.final_tail_max);
    Ok(Outcome::json(&json!({
        "generator": gen,
        "measure": measure,
        "total_mass": sigma.total_mass(),
        "probe": probe,
    }))?
    .with_table(Some(&table))
    .assert(Assertion::new("fc_plus", holds, detail)))
}
