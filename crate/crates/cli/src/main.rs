//! `kendall`: evaluate Kendall transforms, convolutions and renewal
//! quantities, and run the asymptotic diagnostics.

mod commands;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use report::Format;

#[derive(Parser, Debug)]
#[command(name = "kendall", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    #[command(flatten)]
    opts: Options,
}

#[derive(Subcommand, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    /// Williamson transform G, its complement and the truncated moments at each x.
    Transform,
    /// m(α), plus the truncated moments when points are given.
    Moments,
    /// Binary convolution of --dist and --dist2.
    Convolve,
    /// n-fold convolution power.
    Nfold,
    /// Renewal function, derivative and elementary residual.
    Renewal,
    /// Blackwell increments R(x+y) − R(x).
    Blackwell,
    /// Seeded draws from the n-fold convolution power.
    Sample,
    /// Weighted renewal function for the generating function in --gen.
    Weighted,
    /// Run every applicable convergence diagnostic.
    Verify,
}

#[derive(Args, Debug, Clone)]
pub struct Options {
    /// dirac1, pareto, exp, powerlaw, kendallstable or table:<path>
    #[arg(long, global = true)]
    pub dist: Option<String>,

    /// Second law for `convolve`, same syntax as --dist.
    #[arg(long, global = true)]
    pub dist2: Option<String>,

    #[arg(long, global = true, default_value_t = 1.0)]
    pub alpha: f64,

    /// Pareto index.
    #[arg(long, global = true)]
    pub beta: Option<f64>,

    /// Exponent of powerlaw / kendallstable; defaults to --alpha.
    #[arg(long, global = true)]
    pub exponent: Option<f64>,

    /// Interpolation for table:<path> laws.
    #[arg(long, global = true, value_enum, default_value_t = Interp::MonotoneCubic)]
    pub interp: Interp,

    /// Evaluation points, comma separated.
    #[arg(long, global = true, value_delimiter = ',', allow_hyphen_values = true)]
    pub x: Vec<f64>,

    /// Geometric grid `x0:ratio:count`.
    #[arg(long, global = true)]
    pub grid: Option<String>,

    #[arg(long, global = true, default_value_t = 1)]
    pub n: u32,

    /// Increments, comma separated.
    #[arg(long, global = true, value_delimiter = ',')]
    pub y: Vec<f64>,

    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,

    #[arg(long, global = true, default_value_t = 10)]
    pub count: usize,

    /// ones, geometric:<p>, poisson:<lambda> or coeffs:<path>
    #[arg(long, global = true)]
    pub gen: Option<String>,

    /// Terms of the truncated series reported by `renewal`.
    #[arg(long, global = true)]
    pub terms: Option<u32>,

    /// Restrict `verify` to these theorem ids.
    #[arg(long, global = true, value_delimiter = ',')]
    pub theorem: Vec<String>,

    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    pub format: Format,

    #[arg(long, global = true)]
    pub output: Option<PathBuf>,

    /// Pass tolerance for `verify`.
    #[arg(long, global = true)]
    pub tol: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Interp {
    Linear,
    MonotoneCubic,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match commands::run(cli.command, &cli.opts) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(commands::exit_code(&e))
        }
    }
}
