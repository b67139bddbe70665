use std::ffi::OsString;
use std::fs;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

/// Exact evolution, simulation and scaling-limit experiments for cooperative-motion walks.
///
/// Every subcommand also accepts `--config FILE`: a file of `key=value`
/// lines (blank lines and `#` comments ignored) whose entries act as flags.
/// Flags given on the command line win over the file.
#[derive(Debug, Parser)]
#[command(name = "coopmotion", version, propagate_version = true)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evolve a law exactly for `n` steps and write its pmf as `site,mass` CSV.
    #[command(args_override_self = true)]
    Evolve(EvolveArgs),
    /// Sample endpoints of independent trajectories (or the particle system).
    #[command(args_override_self = true)]
    Simulate(SimulateArgs),
    /// Evaluate a closed-form limit or Hamilton–Jacobi reference.
    #[command(args_override_self = true)]
    Reference(ReferenceArgs),
    /// Convergence experiment: Lipschitz data with a rate, or the Dirac limit.
    #[command(args_override_self = true)]
    Converge(ConvergeArgs),
    /// Lattice limit under the `g`-scaled Bernoulli step.
    #[command(args_override_self = true)]
    Lattice(LatticeArgs),
    /// Limit with mass `a` at -inf and `1 - b` at +inf.
    #[command(args_override_self = true)]
    Extended(ExtendedArgs),
    /// Check the ordering of the sandwich construction step by step.
    #[command(args_override_self = true)]
    Sandwich(SandwichArgs),
    /// Growth exponent of the walk that moves when `l` of `m` friends agree.
    #[command(name = "lofm", args_override_self = true)]
    LOfM(LOfMArgs),
    /// Search for an ordered pair whose one-step images are not ordered.
    #[command(args_override_self = true)]
    Counterexample(CounterexampleArgs),
}

#[derive(Debug, Clone, Copy, Args)]
pub struct ModelArgs {
    /// Number of friends.
    #[arg(long)]
    pub m: f64,
    /// Move probability.
    #[arg(long)]
    pub q: f64,
}

#[derive(Debug, Clone, Args)]
pub struct ReportArgs {
    /// Write the full report as JSON.
    #[arg(long)]
    pub report: Option<PathBuf>,
    /// Write the error series as `n,sup_error` CSV.
    #[arg(long)]
    pub series: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct EvolveArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    /// Initial law as `site:mass,...`; sites may be `-inf` or `+inf`.
    #[arg(long, allow_hyphen_values = true)]
    pub init: String,
    /// Number of steps.
    #[arg(long)]
    pub n: u64,
    /// Step law as `d:p,...`. Defaults to the Bernoulli(q) unit step.
    #[arg(long, conflicts_with = "l")]
    pub step: Option<String>,
    /// Move when at least `l` of the `m` friends share the site.
    #[arg(long)]
    pub l: Option<u32>,
    /// Output file. Prints to stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    #[arg(long, default_value = "0:1", allow_hyphen_values = true)]
    pub init: String,
    #[arg(long)]
    pub n: u64,
    #[arg(long)]
    pub step: Option<String>,
    #[arg(long, default_value_t = 10_000)]
    pub trajectories: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Simulate this many interacting particles instead of independent paths.
    #[arg(long)]
    pub particles: Option<usize>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ReferenceKind {
    /// Limit CDF from a Dirac mass (needs x).
    Beta,
    /// Limit with extended atoms (needs x, a, b).
    Extended,
    /// Lattice mixture limit (needs x, g, pi).
    Mixture,
    /// Solution `u^{a,b}(x, t)` (needs x, a, b; t defaults to 1).
    UAb,
    /// Closed-form Legendre transform `H*(p)` (needs p).
    Legendre,
    /// Exact Hopf–Lax value for piecewise-linear data (needs x, knots; t defaults to 1).
    HopfLax,
    /// Sandwich shift `S(eps)` (needs eps).
    SandwichRadius,
}

#[derive(Debug, Args)]
pub struct ReferenceArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    #[arg(long, value_enum)]
    pub kind: ReferenceKind,
    #[arg(long, allow_hyphen_values = true)]
    pub x: Option<f64>,
    /// Tabulate over `lo:hi:count` instead of a single `x`, as `x,value` CSV.
    #[arg(long, conflicts_with = "x", allow_hyphen_values = true)]
    pub grid: Option<String>,
    #[arg(long, default_value_t = 1.0)]
    pub t: f64,
    #[arg(long)]
    pub a: Option<f64>,
    #[arg(long)]
    pub b: Option<f64>,
    #[arg(long)]
    pub g: Option<usize>,
    #[arg(long, value_delimiter = ',')]
    pub pi: Option<Vec<f64>>,
    #[arg(long, allow_hyphen_values = true)]
    pub p: Option<f64>,
    #[arg(long)]
    pub eps: Option<f64>,
    /// Piecewise-linear data as `x:value,...`.
    #[arg(long, allow_hyphen_values = true)]
    pub knots: Option<String>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ConvergeMode {
    Lipschitz,
    Dirac,
}

#[derive(Debug, Args)]
pub struct ConvergeArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    #[arg(long, value_enum)]
    pub mode: ConvergeMode,
    /// Increasing list of N (lipschitz) or n (dirac).
    #[arg(long, value_delimiter = ',', required = true)]
    pub n_list: Vec<u64>,
    /// Dirac mode: initial law. Defaults to a point mass at 0.
    #[arg(long, allow_hyphen_values = true)]
    pub init: Option<String>,
    /// Lipschitz mode: initial CDF as `x:value,...`. Defaults to the unit ramp.
    #[arg(long, allow_hyphen_values = true, conflicts_with = "profile")]
    pub knots: Option<String>,
    /// Lipschitz mode: start from the solution profile `a,b,t0`.
    #[arg(long, value_delimiter = ',', num_args = 1)]
    pub profile: Option<Vec<f64>>,
    /// Lipschitz mode: time horizon.
    #[arg(long, default_value_t = 1.0)]
    pub horizon: f64,
    #[command(flatten)]
    pub output: ReportArgs,
}

#[derive(Debug, Args)]
pub struct LatticeArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    #[arg(long)]
    pub g: usize,
    /// Residue masses, one per class `1..=g`.
    #[arg(long, value_delimiter = ',', required = true)]
    pub pi: Vec<f64>,
    #[arg(long)]
    pub n: u64,
    #[command(flatten)]
    pub output: ReportArgs,
}

#[derive(Debug, Args)]
pub struct ExtendedArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    #[arg(long)]
    pub a: f64,
    #[arg(long)]
    pub b: f64,
    #[arg(long)]
    pub n: u64,
    #[command(flatten)]
    pub output: ReportArgs,
}

#[derive(Debug, Args)]
pub struct SandwichArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    #[arg(long)]
    pub eps: f64,
    #[arg(long)]
    pub n: u64,
    #[arg(long, default_value = "0:1", allow_hyphen_values = true)]
    pub init: String,
    #[command(flatten)]
    pub output: ReportArgs,
}

#[derive(Debug, Args)]
pub struct LOfMArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    #[arg(long)]
    pub l: u32,
    #[arg(long, value_delimiter = ',', required = true)]
    pub n_list: Vec<u64>,
    #[command(flatten)]
    pub output: ReportArgs,
}

#[derive(Debug, Args)]
pub struct CounterexampleArgs {
    /// Step law as `d:p,...`.
    #[arg(long)]
    pub step: String,
    #[arg(long)]
    pub m: f64,
    /// Only used to build the model parameters; the step law carries the move probabilities.
    #[arg(long, default_value_t = 0.5)]
    pub q: f64,
    #[arg(long, default_value_t = 1000)]
    pub trials: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

/// Pull `--config FILE` (or `--config=FILE`) out of `argv` and splice the
/// file's entries in right after the subcommand name, so that later
/// command-line flags override them.
pub fn expand_config(argv: Vec<OsString>) -> Result<Vec<OsString>, String> {
    let mut rest = Vec::with_capacity(argv.len());
    let mut config = None;
    let mut it = argv.into_iter();
    while let Some(arg) = it.next() {
        match arg.to_str() {
            Some("--config") => {
                let path = it.next().ok_or("--config needs a file argument")?;
                config = Some(PathBuf::from(path));
            }
            Some(s) if s.starts_with("--config=") => config = Some(PathBuf::from(&s["--config=".len()..])),
            _ => rest.push(arg),
        }
    }
    let Some(path) = config else { return Ok(rest) };
    let text = fs::read_to_string(&path).map_err(|e| format!("cannot read config {}: {e}", path.display()))?;
    let entries = parse_config(&text).map_err(|e| format!("{}: {e}", path.display()))?;
    if rest.len() < 2 {
        return Err("--config given without a subcommand".into());
    }
    let tail = rest.split_off(2);
    for (key, value) in entries {
        rest.push(format!("--{}", key.replace('_', "-")).into());
        rest.push(value.into());
    }
    rest.extend(tail);
    Ok(rest)
}

fn parse_config(text: &str) -> Result<Vec<(String, String)>, String> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (k, v) = line.split_once('=').ok_or_else(|| format!("line {}: expected key=value", i + 1))?;
        let (k, v) = (k.trim(), v.trim().trim_matches('"'));
        if k.is_empty() || k == "config" {
            return Err(format!("line {}: bad key {k:?}", i + 1));
        }
        out.push((k.to_string(), v.to_string()));
    }
    Ok(out)
}
