//! Command-line harness: one subcommand per experiment, JSON records and CSV
//! dumps for plotting.
//!
//! Exit codes: 0 success, 1 invalid input (bad flags, config, data), 2
//! numerical failure (non-convergence, no admissible plateau levels).

mod commands;
pub mod config;
pub mod output;

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use thiserror::Error;

pub use output::SCHEMA_VERSION;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Validation(String),
    #[error("{0}")]
    Numerical(String),
    #[error("{0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Validation(_) | CliError::Io(_) => 1,
            CliError::Numerical(_) => 2,
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "tvstair", version, about = "1D TV and higher-order restoration experiments")]
pub struct Cli {
    /// Flat `key = value` file; flags override it, it overrides defaults
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Worker threads for sweeps (default: all cores)
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Exact ROF minimizer of monotone data: the ramp, a staircase, or a CSV
    RofExact(RofExactArgs),
    /// ROF on the staircases g_n: plateau levels, window and step fidelity
    RofStaircase(RofStaircaseArgs),
    /// Higher-order denoising of a noisy ramp or of CSV data
    HotDenoise(HotDenoiseArgs),
    /// Energies of a signal CSV or a piecewise-function JSON
    EnergyEval(EnergyEvalArgs),
    /// Generalized Cantor set intervals and the variation-bound report
    CantorFixture(CantorArgs),
    /// ROF against the higher-order model on the same staircases
    Compare(CompareArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, serde::Serialize)]
#[serde(rename_all = "lowercase")]
pub enum DatumKind {
    Ramp,
    Staircase,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, serde::Serialize)]
#[serde(rename_all = "lowercase")]
pub enum NoiseArg {
    None,
    Staircase,
    Square,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, serde::Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum EnergyMode {
    /// Discrete F_p on grid samples
    Discrete,
    /// Relaxed energy with the penalty Φ
    Relaxed,
    /// Relaxed energy split as |ΔΨ₁| + Φ̂ (p = 1 only)
    RelaxedHat,
}

macro_rules! from_str_via_value_enum {
    ($($t:ty),*) => {$(
        impl std::str::FromStr for $t {
            type Err = String;
            fn from_str(s: &str) -> Result<Self, String> {
                <$t as ValueEnum>::from_str(s, true)
            }
        }
    )*};
}
from_str_via_value_enum!(DatumKind, NoiseArg, EnergyMode);

#[derive(Debug, Args)]
pub struct RofExactArgs {
    #[arg(long)]
    pub lambda: Option<f64>,
    /// Built-in datum (ignored with --input)
    #[arg(long, value_enum)]
    pub datum: Option<DatumKind>,
    /// Steps of the staircase datum
    #[arg(long)]
    pub n: Option<usize>,
    /// Nondecreasing signal CSV to use as the datum
    #[arg(long)]
    pub input: Option<PathBuf>,
    /// Cells of the output grid for the built-in data
    #[arg(long)]
    pub cells: Option<usize>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Minimizer samples as `x,value`
    #[arg(long)]
    pub csv: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct RofStaircaseArgs {
    #[arg(long)]
    pub lambda: Option<f64>,
    #[arg(long)]
    pub n: Option<usize>,
    /// Several step counts, comma separated (overrides --n)
    #[arg(long, value_delimiter = ',')]
    pub n_list: Option<Vec<usize>>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Minimizer samples for a single n
    #[arg(long)]
    pub csv: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct HotDenoiseArgs {
    #[arg(long)]
    pub lambda: Option<f64>,
    #[arg(long)]
    pub p: Option<f64>,
    #[arg(long)]
    pub alpha: Option<f64>,
    /// Noise frequency (steps or square-wave cells)
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long, value_enum)]
    pub noise: Option<NoiseArg>,
    /// Square-wave amplitude
    #[arg(long)]
    pub amplitude: Option<f64>,
    #[arg(long)]
    pub cells: Option<usize>,
    /// Signal CSV to denoise instead of the synthetic ramp
    #[arg(long)]
    pub input: Option<PathBuf>,
    #[arg(long)]
    pub eps_abs: Option<f64>,
    #[arg(long)]
    pub max_iters: Option<usize>,
    #[arg(long)]
    pub grad_tol: Option<f64>,
    #[arg(long)]
    pub energy_rel_tol: Option<f64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub csv: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct EnergyEvalArgs {
    /// Signal CSV, or piecewise-function JSON (by `.json` extension)
    #[arg(long)]
    pub input: Option<PathBuf>,
    #[arg(long)]
    pub p: Option<f64>,
    #[arg(long)]
    pub alpha: Option<f64>,
    #[arg(long, value_enum)]
    pub mode: Option<EnergyMode>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct CantorArgs {
    #[arg(long)]
    pub delta: Option<f64>,
    #[arg(long)]
    pub depth: Option<usize>,
    #[arg(long)]
    pub s: Option<f64>,
    #[arg(long)]
    pub alpha: Option<f64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Removed intervals as CSV
    #[arg(long)]
    pub csv: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct CompareArgs {
    #[arg(long, value_delimiter = ',')]
    pub lambda: Option<Vec<f64>>,
    #[arg(long)]
    pub p: Option<f64>,
    #[arg(long)]
    pub alpha: Option<f64>,
    #[arg(long, value_delimiter = ',')]
    pub n_list: Option<Vec<usize>>,
    #[arg(long)]
    pub cells: Option<usize>,
    #[arg(long)]
    pub eps_abs: Option<f64>,
    #[arg(long)]
    pub max_iters: Option<usize>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// One row per (n, lambda)
    #[arg(long)]
    pub csv: Option<PathBuf>,
}

/// Parses `argv` (program name first), runs the subcommand and returns the
/// process exit code. Errors go to stderr.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match commands::dispatch(cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
