//! Built-in control corpus: functions known to be u.d. along primes and
//! functions known not to be.

use primeud::discrepancy::{fractional_parts, star_discrepancy, Domain};
use primeud::hardy::boshernitzan_condition;
use primeud::{HardyExpr, PrimeTable};
use serde::Serialize;

/// `(expression, hypothesis class, expected u.d.)`.
pub const CORPUS: &[(&str, &str, bool)] = &[
    ("x^(1/2) + log^2", "sublinear growth with a log-power part", true),
    ("x^(3/2)", "non-integer growth between x and x^2", true),
    ("x^(3/2) + sqrt(2)*x^2", "irrational polynomial plus non-polynomial part", true),
    ("x^(1/2) + x^2", "rational polynomial plus non-polynomial part", true),
    ("sqrt(2)*x^2", "irrational polynomial alone", true),
    ("log^1", "slower than log^2: Boshernitzan condition fails", false),
    ("x^2 + 1/3*x", "rational polynomial", false),
];

/// Negative controls must keep `D*(N)` above this.
pub const NEGATIVE_FLOOR: f64 = 0.05;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CorpusRow {
    pub expr: String,
    pub class: &'static str,
    pub expected_ud: bool,
    pub boshernitzan: bool,
    pub round_trip: bool,
    /// `(N_j, D*_{N_j})` at `N/100`, `N/10`, `N`.
    pub star: Vec<(usize, f64)>,
    pub boundary_events: u64,
    /// Positives: `D*(N) < D*(N/100) / 2`. Negatives: `D*(N) > 0.05`.
    pub criterion: bool,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CorpusReport {
    pub n: usize,
    pub rows: Vec<CorpusRow>,
    pub passed: usize,
    pub all_pass: bool,
}

pub fn run(n: usize, table: &PrimeTable, chunk: usize) -> primeud::Result<CorpusReport> {
    if n < 100 {
        return Err(primeud::Error::InvalidArgument("corpus needs N >= 100".into()));
    }
    let checkpoints = [n / 100, n / 10, n];
    let mut rows = Vec::with_capacity(CORPUS.len());
    for &(text, class, expected_ud) in CORPUS {
        let expr: HardyExpr = text.parse()?;
        let round_trip = expr.to_string().parse::<HardyExpr>().as_ref() == Ok(&expr);
        let stream = fractional_parts(&expr, 1, Domain::Primes, n, Some(table), chunk)?;
        let star = checkpoints
            .iter()
            .map(|&c| Ok((c, star_discrepancy(&stream.points[..c])?)))
            .collect::<primeud::Result<Vec<_>>>()?;
        let (first, last) = (star[0].1, star[2].1);
        let criterion = if expected_ud {
            last < first / 2.0
        } else {
            last > NEGATIVE_FLOOR
        };
        let boshernitzan = boshernitzan_condition(&expr)?;
        rows.push(CorpusRow {
            expr: expr.to_string(),
            class,
            expected_ud,
            boshernitzan,
            round_trip,
            star,
            boundary_events: stream.boundary_events,
            criterion,
            pass: criterion && round_trip && boshernitzan == expected_ud,
        });
    }
    let passed = rows.iter().filter(|r| r.pass).count();
    Ok(CorpusReport {
        n,
        all_pass: passed == rows.len(),
        passed,
        rows,
    })
}
