//! Command-line front end for `primeud`.
//!
//! [`execute`] is the whole program minus process I/O: it parses arguments,
//! runs one command and returns the artifact text and exit code, which keeps
//! the binary a thin wrapper and the behaviour testable in-process.

pub mod args;
pub mod commands;
pub mod config;
pub mod corpus;
pub mod literals;

use std::path::Path;

use clap::error::ErrorKind;
use clap::Parser;
use primeud::discrepancy::Domain;
use primeud::primes::sieve;
use primeud::PrimeTable;
use serde::Serialize;
use sha2::{Digest, Sha256};

use args::{Cli, Common, Format};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VALIDATION: i32 = 2;
pub const EXIT_ASSERTION: i32 = 3;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Validation(String),
    #[error(transparent)]
    Core(#[from] primeud::Error),
    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),
}

/// A named check whose failure turns the exit code into 3.
#[derive(Clone, Debug, Serialize)]
pub struct Assertion {
    pub name: String,
    pub holds: bool,
    pub detail: String,
}

impl Assertion {
    pub fn new(name: &str, holds: bool, detail: impl Into<String>) -> Self {
        Self {
            name: name.to_string(),
            holds,
            detail: detail.into(),
        }
    }
}

/// What a command produced, before it is wrapped in the envelope.
pub struct Outcome {
    pub result: serde_json::Value,
    pub assertions: Vec<Assertion>,
    pub table_limit: Option<u64>,
    /// Pre-rendered CSV or plot data, for commands that support it.
    pub rows: Option<(String, String)>,
}

impl Outcome {
    pub fn json<T: Serialize>(result: &T) -> Result<Self, CliError> {
        Ok(Self {
            result: serde_json::to_value(result).map_err(|e| CliError::Validation(e.to_string()))?,
            assertions: Vec::new(),
            table_limit: None,
            rows: None,
        })
    }

    pub fn assert(mut self, a: Assertion) -> Self {
        self.assertions.push(a);
        self
    }

    pub fn with_table(mut self, t: Option<&PrimeTable>) -> Self {
        self.table_limit = t.map(PrimeTable::limit);
        self
    }
}

#[derive(Serialize)]
struct Envelope<'a> {
    tool: &'static str,
    version: &'static str,
    command: &'static str,
    config: &'a Cli,
    config_hash: String,
    table_limit: Option<u64>,
    chunk_size: usize,
    precision_mode: &'static str,
    status: &'static str,
    assertions: &'a [Assertion],
    result: &'a serde_json::Value,
}

/// Result of one invocation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Execution {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

impl Execution {
    fn fail(code: i32, msg: String) -> Self {
        Self {
            code,
            stdout: String::new(),
            stderr: msg,
        }
    }
}

/// SHA-256 of the serialized effective configuration.
pub fn config_hash(cli: &Cli) -> String {
    let text = serde_json::to_string(cli).expect("config serializes");
    hex::encode(Sha256::digest(text.as_bytes()))
}

/// Run the program on `argv` (including the binary name).
pub fn execute<S: AsRef<str>>(argv: &[S]) -> Execution {
    let argv: Vec<String> = argv.iter().map(|s| s.as_ref().to_string()).collect();
    let argv = match config::expand_argv(&argv) {
        Ok(a) => a,
        Err(e) => return Execution::fail(EXIT_VALIDATION, format!("error: {e}\n")),
    };
    let cli = match Cli::try_parse_from(&argv) {
        Ok(c) => c,
        Err(e) => {
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => Execution {
                    code: EXIT_OK,
                    stdout: e.to_string(),
                    stderr: String::new(),
                },
                _ => Execution::fail(EXIT_VALIDATION, e.to_string()),
            };
        }
    };
    match run(&cli) {
        Ok(x) => x,
        Err(e) => Execution::fail(EXIT_VALIDATION, format!("error: {e}\n")),
    }
}

fn run(cli: &Cli) -> Result<Execution, CliError> {
    let common = &cli.common;
    if common.chunk == 0 {
        return Err(CliError::Validation("--chunk must be >= 1".into()));
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(common.threads.unwrap_or(0))
        .build()
        .map_err(|e| CliError::Validation(format!("thread pool: {e}")))?;
    let outcome = pool.install(|| commands::dispatch(cli))?;

    let code = if outcome.assertions.iter().all(|a| a.holds) {
        EXIT_OK
    } else {
        EXIT_ASSERTION
    };
    let text = match (common.effective_format(), &outcome.rows) {
        (Format::Json, _) => {
            let env = Envelope {
                tool: "primeud",
                version: env!("CARGO_PKG_VERSION"),
                command: cli.command.name(),
                config: cli,
                config_hash: config_hash(cli),
                table_limit: outcome.table_limit,
                chunk_size: common.chunk,
                precision_mode: "compensated",
                status: if code == EXIT_OK { "ok" } else { "assertion_failed" },
                assertions: &outcome.assertions,
                result: &outcome.result,
            };
            let mut s = serde_json::to_string_pretty(&env).map_err(|e| CliError::Validation(e.to_string()))?;
            s.push('\n');
            s
        }
        (Format::Csv, Some((csv, _))) => csv.clone(),
        (Format::Plotdata, Some((_, plot))) => plot.clone(),
        (f, None) => {
            return Err(CliError::Validation(format!(
                "{} does not support --format {}",
                cli.command.name(),
                serde_json::to_value(f).unwrap().as_str().unwrap()
            )))
        }
    };
    let stderr: String = outcome
        .assertions
        .iter()
        .filter(|a| !a.holds)
        .map(|a| format!("assertion failed: {}: {}\n", a.name, a.detail))
        .collect();
    let stdout = match &common.out {
        Some(path) => {
            std::fs::write(path, &text)?;
            String::new()
        }
        None => text,
    };
    Ok(Execution { code, stdout, stderr })
}

/// Sieve limit large enough for the first `n` elements of `domain`.
///
/// Uses `p_n < n (ln n + ln ln n)` (valid for `n >= 6`) and, for progressions
/// mod q, a factor `1.25 phi(q)` on top of it.
pub fn auto_limit(n: usize, domain: Domain) -> u64 {
    let nf = (n.max(6)) as f64;
    let pn = nf * (nf.ln() + nf.ln().ln());
    let factor = match domain {
        Domain::PrimesInAp { modulus, .. } => 1.25 * totient(modulus) as f64,
        _ => 1.0,
    };
    (pn * 1.02 * factor) as u64 + 100
}

fn totient(mut q: u64) -> u64 {
    let mut out = q;
    let mut p = 2;
    while p * p <= q {
        if q % p == 0 {
            while q % p == 0 {
                q /= p;
            }
            out -= out / p;
        }
        p += 1;
    }
    if q > 1 {
        out -= out / q;
    }
    out
}

/// Prime table up to `--table-limit` (or `fallback`), through the cache directory if set.
pub fn prime_table(common: &Common, fallback: u64) -> Result<PrimeTable, CliError> {
    let limit = common.table_limit.unwrap_or(fallback);
    match &common.cache {
        Some(dir) => {
            std::fs::create_dir_all(dir)?;
            let path = dir.join(format!("primes-{limit}.bin"));
            Ok(PrimeTable::load_or_sieve(Path::new(&path), limit)?)
        }
        None => Ok(sieve(limit)?),
    }
}
