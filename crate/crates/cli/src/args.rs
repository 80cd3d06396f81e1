use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use primeud::discrepancy::Domain;
use primeud::HardyExpr;
use serde::Serialize;

fn expr(s: &str) -> Result<HardyExpr, String> {
    s.parse::<HardyExpr>().map_err(|e| format!("malformed expression {s:?}: {e}"))
}

fn domain(s: &str) -> Result<Domain, String> {
    s.parse::<Domain>().map_err(|e| e.to_string())
}

#[derive(Parser, Debug, Clone, Serialize)]
#[command(
    name = "primeud",
    version,
    about = "Equidistribution along primes: sieves, Weyl sums, discrepancy and recurrence models",
    args_override_self = true
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    #[command(flatten)]
    pub common: Common,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct Common {
    /// Worker threads (default: all cores). Results do not depend on it.
    #[arg(long, global = true)]
    #[serde(skip)]
    pub threads: Option<usize>,

    /// Chunk size of every parallel reduction; recorded in the output.
    #[arg(long, global = true, default_value_t = primeud::parallel::DEFAULT_CHUNK)]
    pub chunk: usize,

    /// Seed for randomized trials.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,

    /// Output file (default: stdout).
    #[arg(long, global = true)]
    #[serde(skip)]
    pub out: Option<PathBuf>,

    /// Default: from the `--out` extension (`.csv`, `.dat`), else json.
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,

    /// Sieve limit; by default sized from the requested number of primes.
    #[arg(long = "table-limit", global = true)]
    pub table_limit: Option<u64>,

    /// Directory for on-disk prime caches (env PRIMEUD_CACHE_DIR).
    #[arg(long, global = true, env = "PRIMEUD_CACHE_DIR")]
    #[serde(skip)]
    pub cache: Option<PathBuf>,

    /// Flat `key = value` file supplying defaults for any flag.
    #[arg(long, global = true)]
    #[serde(skip)]
    pub config: Option<PathBuf>,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
    Plotdata,
}

impl Common {
    pub fn effective_format(&self) -> Format {
        let ext = self.out.as_ref().and_then(|p| p.extension()).and_then(|e| e.to_str());
        match (self.format, ext) {
            (Some(f), _) => f,
            (None, Some("csv")) => Format::Csv,
            (None, Some("dat")) => Format::Plotdata,
            _ => Format::Json,
        }
    }
}

#[derive(Subcommand, Debug, Clone, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    /// Sieve primes, report pi(x) checkpoints and progression balance.
    Sieve(SieveArgs),
    /// Discrepancy of {q f(n)} along integers, primes or a progression.
    UdTest(UdTestArgs),
    /// Exponential sum of e(q f(n)) over a range.
    WeylSum(WeylSumArgs),
    /// Check Vaughan's identity for g(n) = e(phase(n)).
    VaughanCheck(VaughanArgs),
    /// Compare an exponential-sum or discrepancy bound with the actual value.
    BoundCheck(BoundArgs),
    /// Mean ergodic averages of diagonal unitaries along primes.
    ErgodicAverage(ErgodicArgs),
    /// Recurrence averages on a torus or a periodic lattice set.
    RecurrenceScan(RecurrenceArgs),
    /// Fourier coefficients of a spectral measure along a prime sequence.
    FcplusProbe(FcplusArgs),
    /// Run the built-in positive/negative control corpus.
    CorpusRun(CorpusArgs),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Self::Sieve(_) => "sieve",
            Self::UdTest(_) => "ud-test",
            Self::WeylSum(_) => "weyl-sum",
            Self::VaughanCheck(_) => "vaughan-check",
            Self::BoundCheck(_) => "bound-check",
            Self::ErgodicAverage(_) => "ergodic-average",
            Self::RecurrenceScan(_) => "recurrence-scan",
            Self::FcplusProbe(_) => "fcplus-probe",
            Self::CorpusRun(_) => "corpus-run",
        }
    }
}

pub const COMMANDS: &[&str] = &[
    "sieve",
    "ud-test",
    "weyl-sum",
    "vaughan-check",
    "bound-check",
    "ergodic-average",
    "recurrence-scan",
    "fcplus-probe",
    "corpus-run",
];

#[derive(Args, Debug, Clone, Serialize)]
pub struct SieveArgs {
    #[arg(long, default_value_t = 1_000_000)]
    pub limit: u64,

    /// Also report prime balance in progressions mod q <= q-max.
    #[arg(long = "q-max")]
    pub q_max: Option<u64>,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct UdTestArgs {
    #[arg(long, value_parser = expr)]
    pub expr: HardyExpr,

    #[arg(long, default_value_t = 1, allow_negative_numbers = true)]
    pub q: i64,

    #[arg(long = "N", default_value_t = 10_000)]
    pub n: usize,

    /// `integers`, `primes` or `ap:Q:T`.
    #[arg(long, value_parser = domain, default_value = "primes")]
    pub domain: Domain,

    /// Prefix sizes for the CSV rows (default: decades up to N).
    #[arg(long, value_delimiter = ',')]
    pub checkpoints: Option<Vec<usize>>,

    /// Erdos-Turan cutoff Q.
    #[arg(long = "et-q")]
    pub et_q: Option<u64>,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct WeylSumArgs {
    #[arg(long, value_parser = expr)]
    pub expr: HardyExpr,

    #[arg(long, default_value_t = 1, allow_negative_numbers = true)]
    pub q: i64,

    #[arg(long, value_parser = domain, default_value = "primes")]
    pub domain: Domain,

    /// Sum over the first N elements of the domain.
    #[arg(long = "N")]
    pub n: Option<usize>,

    /// Integers: first summand; primes: exclusive lower bound X0.
    #[arg(long)]
    pub from: Option<u64>,

    /// Inclusive upper bound.
    #[arg(long)]
    pub to: Option<u64>,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct VaughanArgs {
    #[arg(long = "X")]
    pub x: u64,

    #[arg(long)]
    pub u: u64,

    #[arg(long)]
    pub v: u64,

    /// g(n) = e(phase(n)).
    #[arg(long, value_parser = expr)]
    pub phase: HardyExpr,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum BoundKind {
    KusminLandau,
    Vdc,
    Composite,
    ErdosTuran,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct BoundArgs {
    #[arg(long, value_enum)]
    pub kind: BoundKind,

    #[arg(long, value_parser = expr)]
    pub expr: Option<HardyExpr>,

    #[arg(long, default_value_t = 1, allow_negative_numbers = true)]
    pub q: i64,

    /// Kusmin-Landau and vdc interval start.
    #[arg(long)]
    pub from: Option<u64>,

    /// Kusmin-Landau and vdc interval end.
    #[arg(long)]
    pub to: Option<u64>,

    /// Composite bound: derivative order k (K = 2^k).
    #[arg(long, default_value_t = 1)]
    pub k: u32,

    /// Composite bound: interval (X1, X1 + X].
    #[arg(long = "X1")]
    pub x1: Option<u64>,

    #[arg(long = "X")]
    pub x: Option<u64>,

    #[arg(long)]
    pub lambda: Option<f64>,

    #[arg(long)]
    pub alpha: Option<f64>,

    /// Van der Corput shift range.
    #[arg(long = "H", default_value_t = 10)]
    pub h: usize,

    /// Points per trial (vdc with random xi, Erdos-Turan).
    #[arg(long = "N", default_value_t = 1000)]
    pub n: usize,

    /// Randomized trials (vdc without --expr).
    #[arg(long, default_value_t = 1)]
    pub trials: usize,

    #[arg(long, value_parser = domain, default_value = "primes")]
    pub domain: Domain,

    #[arg(long = "et-q", default_value_t = 50)]
    pub et_q: u64,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct GeneratorArgs {
    /// Number l of polynomial coordinates (p+s), ..., (p+s)^l.
    #[arg(long = "poly-degree", default_value_t = 0)]
    pub poly_degree: u32,

    /// Hardy functions xi_j, separated by ';'.
    #[arg(long, value_delimiter = ';', value_parser = expr)]
    pub exprs: Vec<HardyExpr>,

    /// Integer matrix L, rows separated by ';', entries by ','.
    #[arg(long = "L")]
    pub l: Option<String>,

    /// s in {-1, 0, 1}.
    #[arg(long, default_value_t = 0, allow_negative_numbers = true)]
    pub shift: i64,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct ErgodicArgs {
    #[command(flatten)]
    pub generator: GeneratorArgs,

    /// Frequency matrix (dim rows of k entries in [0,1)), e.g. "0.618,0;0,0".
    #[arg(long)]
    pub freqs: String,

    /// Real coordinates of f (default: all ones).
    #[arg(long, value_delimiter = ',')]
    pub f: Option<Vec<f64>>,

    #[arg(long = "N", default_value_t = 10_000)]
    pub n: usize,

    #[arg(long, value_delimiter = ',')]
    pub checkpoints: Option<Vec<usize>>,

    /// Exit 3 if the final deviation exceeds this.
    #[arg(long = "max-deviation")]
    pub max_deviation: Option<f64>,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Target {
    Torus,
    Lattice,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct RecurrenceArgs {
    #[arg(long, value_enum)]
    pub target: Target,

    #[command(flatten)]
    pub generator: GeneratorArgs,

    /// Torus: rotation vectors alpha_i, one per row.
    #[arg(long)]
    pub alphas: Option<String>,

    /// Torus: boxes `lo1,lo2:hi1,hi2` separated by ';', rational corners.
    #[arg(long)]
    pub boxes: Option<String>,

    /// Lattice: periods per coordinate.
    #[arg(long, value_delimiter = ',')]
    pub period: Option<Vec<u64>>,

    /// Lattice: 0/1 mask over the fundamental box, row-major.
    #[arg(long)]
    pub mask: Option<String>,

    /// Lattice: E = (mZ)^k instead of --period/--mask.
    #[arg(long)]
    pub multiples: Option<u64>,

    #[arg(long = "N", default_value_t = 10_000)]
    pub n: usize,

    /// Divisibility filters r for D^(r).
    #[arg(long, value_delimiter = ',')]
    pub filter: Vec<u64>,

    /// Exit 3 if the margin falls below this.
    #[arg(long = "min-margin", allow_negative_numbers = true)]
    pub min_margin: Option<f64>,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct FcplusArgs {
    #[command(flatten)]
    pub generator: GeneratorArgs,

    /// Atoms `x1,x2:mass` separated by ';'.
    #[arg(long)]
    pub atoms: Option<String>,

    /// Density coefficients `m1,m2:re,im` separated by ';'.
    #[arg(long)]
    pub density: Option<String>,

    /// Add Lebesgue measure (density 1).
    #[arg(long)]
    pub lebesgue: bool,

    #[arg(long = "N", default_value_t = 10_000)]
    pub n: usize,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct CorpusArgs {
    #[arg(long = "N", default_value_t = 10_000)]
    pub n: usize,
}
