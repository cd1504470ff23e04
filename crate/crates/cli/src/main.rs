//! `bdelta`: every verification in the bessel-delta library as a
//! reproducible command with CSV or JSON output.
//!
//! Exit codes: 0 when every row passes, 1 when some row fails its
//! tolerance, 2 on a precondition or configuration error.

mod commands;
mod config;
mod output;

use bessel_delta::special_fn::BesselKernel;
use clap::{Args, Parser, Subcommand, ValueEnum};
use output::Table;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser, Debug)]
#[command(name = "bdelta", version, about = "Bessel delta-method numerics for GL(2)")]
pub struct Cli {
    /// Write results here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    /// Seed for randomized sweeps.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// key=value file supplying defaults for any flag.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

fn parse_kernel(s: &str) -> Result<BesselKernel, String> {
    s.parse::<BesselKernel>().map_err(|e| e.to_string())
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Evaluate the delta-method approximation to δ(n = r) (one modulus) or
    /// δ(n = m) (two moduli). Rows sorted by p, q, r, n.
    DeltaCheck(DeltaCheckArgs),
    /// I_g(a, b; X), its main term C_U and their ratio. Rows sorted by a, b.
    Besselint(BesselintArgs),
    /// Gauss, Ramanujan, Kloosterman and the character sum c(...) of the
    /// amplified second moment.
    Charsum(CharsumArgs),
    /// Both sides of the level-one Voronoi formula. Rows sorted by a, c, N.
    Voronoi(VoronoiArgs),
    /// Exponential sums over Hecke eigenvalues of Δ. Rows sorted by N.
    Expsum(ExpsumArgs),
    /// Derivative-test certificate battery. Rows sorted by case index.
    Certify(CertifyArgs),
    /// Compute or refresh the τ cache and print its checksum.
    Tau(TauArgs),
}

#[derive(Args, Debug)]
pub struct DeltaCheckArgs {
    /// Prime modulus (comma-separated list allowed).
    #[arg(long, value_delimiter = ',', required = true)]
    pub p: Vec<u64>,
    /// Second prime modulus; selects the two-moduli form.
    #[arg(long)]
    pub q: Option<u64>,
    /// Reference integer r (or m), list allowed.
    #[arg(long, alias = "m", value_delimiter = ',', required = true)]
    pub r: Vec<u64>,
    /// Integers n to test, list allowed.
    #[arg(long, value_delimiter = ',')]
    pub n: Vec<u64>,
    /// Add this many seeded random n in [r/2, 2r] for each (p, r).
    #[arg(long, default_value_t = 0)]
    pub random: usize,
    #[arg(long = "X")]
    pub x: f64,
    #[arg(long, default_value = "holo:12", value_parser = parse_kernel)]
    pub kernel: BesselKernel,
    #[arg(long = "J", default_value_t = 0)]
    pub j: usize,
    /// Override the tolerance for progression cases.
    #[arg(long)]
    pub tol: Option<f64>,
}

#[derive(Args, Debug)]
pub struct BesselintArgs {
    #[arg(long, value_delimiter = ',', required = true, allow_negative_numbers = true)]
    pub a: Vec<f64>,
    #[arg(long, value_delimiter = ',', required = true)]
    pub b: Vec<f64>,
    #[arg(long = "X")]
    pub x: f64,
    #[arg(long, default_value = "holo:12", value_parser = parse_kernel)]
    pub kernel: BesselKernel,
    #[arg(long = "J", default_value_t = 0)]
    pub j: usize,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum CharsumKind {
    Gauss,
    Ramanujan,
    Kloosterman,
    Frakc,
}

#[derive(Args, Debug)]
pub struct CharsumArgs {
    #[arg(value_enum)]
    pub kind: CharsumKind,
    /// Prime modulus (gauss, ramanujan, frakc); list allowed.
    #[arg(long, value_delimiter = ',')]
    pub q: Vec<u64>,
    /// Character index (power of the generator character); default all
    /// nonprincipal characters, or random ones for --random.
    #[arg(long, value_delimiter = ',')]
    pub k: Vec<u64>,
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    pub a: Vec<i64>,
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    pub b: Vec<i64>,
    /// Kloosterman modulus, list allowed.
    #[arg(long, value_delimiter = ',')]
    pub c: Vec<u64>,
    #[arg(long, allow_negative_numbers = true)]
    pub r1: Option<i64>,
    #[arg(long, allow_negative_numbers = true)]
    pub r2: Option<i64>,
    #[arg(long, allow_negative_numbers = true)]
    pub alpha: Option<i64>,
    #[arg(long, allow_negative_numbers = true)]
    pub gamma: Option<i64>,
    #[arg(long, allow_negative_numbers = true)]
    pub m: Option<i64>,
    /// frakc: this many seeded random tuples per q instead of one explicit tuple.
    #[arg(long, default_value_t = 0)]
    pub random: usize,
    #[arg(long, default_value_t = 1e-10)]
    pub tol: f64,
}

#[derive(Args, Debug)]
pub struct VoronoiArgs {
    #[arg(long, value_delimiter = ',', required = true, allow_negative_numbers = true)]
    pub a: Vec<i64>,
    #[arg(long, value_delimiter = ',', required = true)]
    pub c: Vec<u64>,
    #[arg(long = "N", value_delimiter = ',', required = true)]
    pub n: Vec<f64>,
    /// Dual-sum truncation cutoff.
    #[arg(long, default_value_t = bessel_delta::forms::voronoi::DEFAULT_TOL)]
    pub tol: f64,
    /// Fixed η as re[,im]; determined numerically when omitted.
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    pub eta: Vec<f64>,
    #[arg(long, default_value_t = 1e-6)]
    pub rel: f64,
    #[arg(long, default_value_t = 1e-8)]
    pub abs: f64,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum ExpsumMode {
    Smooth,
    Sharp,
    Twisted,
    Amplify,
    Fit,
}

#[derive(Args, Debug)]
pub struct ExpsumArgs {
    #[arg(value_enum)]
    pub mode: ExpsumMode,
    /// Sum to fit in `fit` mode.
    #[arg(long, value_enum, default_value_t = ExpsumMode::Smooth)]
    pub of: ExpsumMode,
    /// N values, list allowed.
    #[arg(long = "N", value_delimiter = ',')]
    pub n: Vec<f64>,
    /// Dyadic range lo:hi, meaning N = 2^lo, ..., 2^hi.
    #[arg(long)]
    pub dyadic: Option<String>,
    /// smooth: absolute T (overrides --theta).
    #[arg(long = "T")]
    pub big_t: Option<f64>,
    /// smooth: T = N^theta.
    #[arg(long, default_value_t = 0.9)]
    pub theta: f64,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub gamma: f64,
    /// Window ramp parameter Δ of V = plateau(1, 2, Δ).
    #[arg(long, default_value_t = 8.0)]
    pub delta: f64,
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    pub alpha: f64,
    #[arg(long, default_value_t = 0.9)]
    pub beta: f64,
    /// Character modulus (twisted, amplify).
    #[arg(long, default_value_t = 7)]
    pub q: u64,
    #[arg(long, default_value_t = 1)]
    pub k: u64,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub t: f64,
    /// Amplifier primes.
    #[arg(long = "L", value_delimiter = ',', default_values_t = [11u64, 13])]
    pub l: Vec<u64>,
    /// amplify: residual must be <= tol (1 + |S|).
    #[arg(long, default_value_t = 1e-9)]
    pub tol: f64,
    /// fit: slope cap; defaults to the shape bound for smooth and sharp sums.
    #[arg(long, allow_negative_numbers = true)]
    pub cap: Option<f64>,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum LemmaArg {
    A1,
    A2,
    A3,
}

#[derive(Args, Debug)]
pub struct CertifyArgs {
    #[arg(long, value_enum)]
    pub lemma: LemmaArg,
    /// JSON grid file; the built-in grid for the lemma when omitted.
    #[arg(long)]
    pub grid: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct TauArgs {
    #[arg(long = "n-max")]
    pub n_max: usize,
    /// Cache directory; defaults to $BDELTA_CACHE_DIR.
    #[arg(long)]
    pub cache: Option<PathBuf>,
    /// Recompute even if a valid cache exists.
    #[arg(long)]
    pub refresh: bool,
}

fn emit(cli: &Cli, table: &Table) -> std::io::Result<()> {
    let mut buf = Vec::new();
    match cli.format {
        Format::Csv => table.write_csv(&mut buf)?,
        Format::Json => table.write_json(&mut buf)?,
    }
    match &cli.out {
        Some(p) => std::fs::write(p, &buf),
        None => std::io::stdout().write_all(&buf),
    }
}

fn main() -> ExitCode {
    let args = match config::expand(std::env::args_os().collect()) {
        Ok(a) => a,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    let table = match commands::run(&cli) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    if let Err(e) = emit(&cli, &table) {
        eprintln!("error: cannot write output: {e}");
        return ExitCode::from(2);
    }
    if table.all_pass() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}
