use std::fmt::Write as _;

use serde::Serialize;

use super::exact::{extreme_discrepancy, star_discrepancy, EXTREME_CAP};
use super::stream::{fractional_parts, Domain, FracStream};
use crate::error::{Error, Result};
use crate::expsums::{weyl_sum_points, weyl_sum_values, BoundConstants, SumConfig};
use crate::hardy::{family_combination_check, CombinationDomain, HardyExpr};
use crate::parallel::DEFAULT_CHUNK;
use crate::primes::PrimeTable;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Source {
    pub expr: String,
    pub q: i64,
    pub domain: Domain,
    pub first_arg: u64,
    pub last_arg: u64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct WeylModulus {
    pub q: u64,
    pub normalized: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DiscrepancyReport {
    pub n: usize,
    pub star: f64,
    /// Exact extreme discrepancy, present for `N <= 10^4`.
    pub extreme: Option<f64>,
    /// `[D*, 2 D*]`, which always contains the extreme discrepancy.
    pub sandwich: [f64; 2],
    pub et_bound: f64,
    pub et_q: u64,
    pub weyl_moduli: Vec<WeylModulus>,
    pub boundary_events: u64,
    pub source: Source,
}

impl DiscrepancyReport {
    pub fn max_weyl(&self) -> f64 {
        self.weyl_moduli.iter().map(|w| w.normalized).fold(0.0, f64::max)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ReportOptions {
    /// Erdos-Turan cutoff; `None` picks `clamp(sqrt N, 1, 256)`.
    pub et_q: Option<u64>,
    pub weyl_q_max: u64,
    pub consts: BoundConstants,
    pub chunk: usize,
}

impl Default for ReportOptions {
    fn default() -> Self {
        Self {
            et_q: None,
            weyl_q_max: 10,
            consts: BoundConstants::default(),
            chunk: DEFAULT_CHUNK,
        }
    }
}

impl ReportOptions {
    fn et_q_for(&self, n: usize) -> u64 {
        self.et_q.unwrap_or_else(|| ((n as f64).sqrt().ceil() as u64).clamp(1, 256))
    }
}

struct Summary {
    star: f64,
    et_bound: f64,
    et_q: u64,
    weyl: Vec<WeylModulus>,
}

fn summarize(points: &[f64], opts: &ReportOptions) -> Result<Summary> {
    let n = points.len();
    let star = star_discrepancy(points)?;
    let et_q = opts.et_q_for(n);
    let q_top = et_q.max(opts.weyl_q_max);
    let mut et_acc = 0.0;
    let mut weyl = Vec::new();
    for q in 1..=q_top {
        let r = weyl_sum_points(points, q as i64, opts.chunk)?;
        if q <= et_q {
            et_acc += r.normalized / q as f64;
        }
        if q <= opts.weyl_q_max {
            weyl.push(WeylModulus {
                q,
                normalized: r.normalized,
            });
        }
    }
    let et_bound = opts.consts.erdos_turan * (1.0 / et_q as f64 + et_acc);
    Ok(Summary {
        star,
        et_bound,
        et_q,
        weyl,
    })
}

pub fn discrepancy_report(stream: &FracStream, source: Source, opts: &ReportOptions) -> Result<DiscrepancyReport> {
    let n = stream.points.len();
    let s = summarize(&stream.points, opts)?;
    let extreme = if n <= EXTREME_CAP {
        Some(extreme_discrepancy(&stream.points)?)
    } else {
        None
    };
    Ok(DiscrepancyReport {
        n,
        star: s.star,
        extreme,
        sandwich: [s.star, (2.0 * s.star).min(1.0)],
        et_bound: s.et_bound,
        et_q: s.et_q,
        weyl_moduli: s.weyl,
        boundary_events: stream.boundary_events,
        source,
    })
}

/// Fractional parts of `q expr` over the first `n` indices of `domain`, and their report.
pub fn analyze(
    expr: &HardyExpr,
    q: i64,
    domain: Domain,
    n: usize,
    table: Option<&PrimeTable>,
    opts: &ReportOptions,
) -> Result<DiscrepancyReport> {
    let stream = fractional_parts(expr, q, domain, n, table, opts.chunk)?;
    let source = Source {
        expr: expr.to_string(),
        q,
        domain,
        first_arg: stream.args[0],
        last_arg: *stream.args.last().unwrap(),
    };
    discrepancy_report(&stream, source, opts)
}

/// Discrepancy of `{q_exp expr(p)}` over the first `n` primes `p = t mod modulus`.
pub fn ud_along_ap(
    expr: &HardyExpr,
    q_exp: i64,
    modulus: u64,
    residue: i64,
    n: usize,
    table: &PrimeTable,
    opts: &ReportOptions,
) -> Result<DiscrepancyReport> {
    let domain = Domain::primes_in_ap(modulus, residue)?;
    analyze(expr, q_exp, domain, n, Some(table), opts)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct CheckpointRow {
    pub n: usize,
    pub star: f64,
    pub et_bound: f64,
    pub max_weyl_q10: f64,
}

/// Summaries of every prefix `points[..c]` for the given checkpoints.
pub fn checkpoint_rows(stream: &FracStream, checkpoints: &[usize], opts: &ReportOptions) -> Result<Vec<CheckpointRow>> {
    let opts = ReportOptions {
        weyl_q_max: 10,
        ..*opts
    };
    checkpoints
        .iter()
        .map(|&c| {
            if c == 0 || c > stream.points.len() {
                return Err(Error::InvalidArgument(format!(
                    "checkpoint {c} outside 1..={}",
                    stream.points.len()
                )));
            }
            let s = summarize(&stream.points[..c], &opts)?;
            Ok(CheckpointRow {
                n: c,
                star: s.star,
                et_bound: s.et_bound,
                max_weyl_q10: s.weyl.iter().map(|w| w.normalized).fold(0.0, f64::max),
            })
        })
        .collect()
}

pub fn rows_to_csv(rows: &[CheckpointRow]) -> String {
    let mut out = String::from("N,star,et_bound,max_weyl_q10\n");
    for r in rows {
        let _ = writeln!(out, "{},{},{},{}", r.n, r.star, r.et_bound, r.max_weyl_q10);
    }
    out
}

/// Two whitespace-separated columns (`N star`) for gnuplot.
pub fn rows_to_plotdata(rows: &[CheckpointRow]) -> String {
    let mut out = String::from("# N star\n");
    for r in rows {
        let _ = writeln!(out, "{} {}", r.n, r.star);
    }
    out
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct JointRow {
    pub vector: Vec<i64>,
    pub normalized: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct JointWeylReport {
    pub rows: Vec<JointRow>,
    pub max_normalized: f64,
    /// Whether the non-polynomial family passes the integer combination check.
    pub family_admissible: bool,
}

/// Normalized Weyl sums of `sum a_i P_i + sum b_j xi_j` for each vector
/// `(a_1.., b_1..)`, where `P` is `poly_part` and `xi` is `family`.
///
/// A dependent family is not rejected: the combination that cancels shows up
/// as a modulus near 1, and `family_admissible` records the symbolic verdict.
pub fn joint_weyl_test(
    family: &[HardyExpr],
    poly_part: &[HardyExpr],
    vectors: &[Vec<i64>],
    n: usize,
    domain: Domain,
    table: Option<&PrimeTable>,
    cfg: &SumConfig,
) -> Result<JointWeylReport> {
    let dim = poly_part.len() + family.len();
    if dim == 0 || vectors.is_empty() {
        return Err(Error::Empty("joint Weyl test needs functions and vectors".into()));
    }
    let exprs: Vec<HardyExpr> = poly_part.iter().chain(family).cloned().collect();
    for v in vectors {
        if v.len() != dim {
            return Err(Error::Dimension(format!("vector of length {} for {dim} functions", v.len())));
        }
        if v.iter().all(|&c| c == 0) {
            return Err(Error::InvalidArgument("zero frequency vector".into()));
        }
    }
    let family_admissible = family.is_empty() || family_combination_check(family, CombinationDomain::Integers)?;
    let args = domain.first(n, table)?;
    let mut rows = Vec::with_capacity(vectors.len());
    for v in vectors {
        let phase = HardyExpr::linear_combination(&exprs, v)?;
        let normalized = if phase.is_zero() {
            1.0
        } else {
            weyl_sum_values(&phase, 1, &args, cfg)?.normalized
        };
        rows.push(JointRow {
            vector: v.clone(),
            normalized,
        });
    }
    let max_normalized = rows.iter().map(|r| r.normalized).fold(0.0, f64::max);
    Ok(JointWeylReport {
        rows,
        max_normalized,
        family_admissible,
    })
}
