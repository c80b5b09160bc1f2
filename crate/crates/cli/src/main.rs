//! `euaf` command-line driver.

mod commands;
mod output;
mod selftest;
mod targets;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

/// Fixed-architecture EUAF network approximation: univariate fits, KST
/// compositions and width lower-bound witnesses.
#[derive(Debug, Parser)]
#[command(name = "euaf", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Fit a univariate target inside the width-36/depth-5 template.
    Fit(FitArgs),
    /// Approximate a synthetic multivariate target through a KST composition.
    Compose(ComposeArgs),
    /// Certify the two-point error gap of width-(d-1) networks.
    Witness(WitnessArgs),
    /// Run quick built-in consistency checks.
    Selftest(CommonArgs),
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct CommonArgs {
    /// Random seed.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Search budget in objective evaluations per fit.
    #[arg(long, default_value_t = 200_000)]
    pub budget: usize,
    /// Output directory.
    #[arg(long, env = "EUAF_OUT_DIR", default_value = "euaf-out")]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct FitArgs {
    /// Target id: const<v> (e.g. const0.3), linear, abs-half, sin2pi.
    #[arg(long)]
    pub target: String,
    /// Domain `a,b`.
    #[arg(long, default_value = "0,1", allow_hyphen_values = true, value_parser = parse_domain)]
    pub domain: (f64, f64),
    /// One or more tolerances, comma separated.
    #[arg(long, required = true, value_delimiter = ',')]
    pub eps: Vec<f64>,
    /// Points in the exported error table.
    #[arg(long, default_value_t = 2001)]
    pub grid: usize,
    #[command(flatten)]
    #[serde(flatten)]
    pub common: CommonArgs,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct ComposeArgs {
    /// Target id: kst-identity, kst-power.
    #[arg(long, default_value = "kst-power")]
    pub target: String,
    /// Input dimension.
    #[arg(long, default_value_t = 2)]
    pub d: usize,
    /// Domain `a,b` of every coordinate.
    #[arg(long, default_value = "0,1", allow_hyphen_values = true, value_parser = parse_domain)]
    pub domain: (f64, f64),
    #[arg(long, default_value_t = 0.5)]
    pub eps: f64,
    /// Custom weights λ, comma separated (defaults to 1/d each).
    #[arg(long, value_delimiter = ',')]
    pub lambda: Option<Vec<f64>>,
    /// Verification points per axis (default depends on d).
    #[arg(long)]
    pub grid: Option<usize>,
    #[command(flatten)]
    #[serde(flatten)]
    pub common: CommonArgs,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct WitnessArgs {
    /// Family id: abs2 (c_j = 1, h_j(x) = 2|x|).
    #[arg(long, default_value = "abs2")]
    pub target: String,
    #[arg(long, default_value_t = 3)]
    pub d: usize,
    /// Directory of serialized networks (`*.txt`) to certify.
    #[arg(long)]
    pub nets: Option<PathBuf>,
    /// Number of random width-(d-1) networks.
    #[arg(long, default_value_t = 0)]
    pub random: usize,
    /// Number of search-trained width-(d-1) networks (uses --budget each).
    #[arg(long, default_value_t = 0)]
    pub trained: usize,
    #[command(flatten)]
    #[serde(flatten)]
    pub common: CommonArgs,
}

fn parse_domain(s: &str) -> Result<(f64, f64), String> {
    let (a, b) = s.split_once(',').ok_or_else(|| format!("expected `a,b`, got `{s}`"))?;
    let a: f64 = a.trim().parse().map_err(|e| format!("bad lower bound `{a}`: {e}"))?;
    let b: f64 = b.trim().parse().map_err(|e| format!("bad upper bound `{b}`: {e}"))?;
    if !(a < b) || !a.is_finite() || !b.is_finite() {
        return Err(format!("domain needs finite a < b, got [{a}, {b}]"));
    }
    Ok((a, b))
}

/// Process outcome: the claim was met, or it was not.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Met,
    Unmet,
}

/// Invalid configuration detected after argument parsing.
#[derive(Debug)]
pub struct UsageError(pub String);

impl std::fmt::Display for UsageError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = match cli.command {
        Command::Fit(args) => commands::fit(&args),
        Command::Compose(args) => commands::compose(&args),
        Command::Witness(args) => commands::witness(&args),
        Command::Selftest(args) => commands::selftest(&args),
    };
    match result {
        Ok(Outcome::Met) => ExitCode::SUCCESS,
        Ok(Outcome::Unmet) => ExitCode::from(2),
        Err(e) => {
            let kind = if e.is::<UsageError>() { "usage error" } else { "error" };
            eprintln!("{kind}: {e:#}");
            ExitCode::from(1)
        }
    }
}
