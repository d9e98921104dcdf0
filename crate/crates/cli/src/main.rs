//! `tdse`: run solvers, convergence studies and example reproductions from
//! the command line.

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use tdse_core::xform::CMode;

#[derive(Parser, Debug)]
#[command(name = "tdse", version, about = "Spectral solvers for the time-dependent Schrödinger equation")]
struct Cli {
    /// Experiment config (JSON).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Run sweep points one after another and omit timing columns, so CSVs are reproducible.
    #[arg(long, global = true)]
    serial: bool,
    /// Directory for CSVs, snapshots and metadata.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run a config with the periodic solver.
    RunPeriodic(RunArgs),
    /// Run a config with the free-space solver.
    RunFree(RunArgs),
    /// Sweep one resolution parameter against the config's reference.
    Convergence(ConvergenceArgs),
    /// Compare the fast transforms with dense summation.
    TransformTest(TransformTestArgs),
    /// Reproduce a named example.
    Example(ExampleArgs),
    /// Print the contour nodes and weights as CSV.
    DumpQuadrature(DumpArgs),
}

#[derive(Args, Debug)]
struct RunArgs {
    #[arg(long)]
    steps: Option<usize>,
    #[arg(long)]
    order: Option<usize>,
    /// Grid points per dimension.
    #[arg(long, value_delimiter = ',')]
    m: Option<Vec<usize>>,
}

#[derive(Args, Debug)]
#[group(id = "param", required = true, multiple = false)]
struct SweepChoice {
    /// Step counts, comma separated.
    #[arg(long, value_delimiter = ',', group = "param")]
    steps: Option<Vec<usize>>,
    /// Grid sizes, comma separated (applied to every dimension).
    #[arg(long, value_delimiter = ',', group = "param")]
    m: Option<Vec<usize>>,
    /// Leg spacings, comma separated.
    #[arg(long, value_delimiter = ',', group = "param")]
    h: Option<Vec<f64>>,
}

#[derive(Args, Debug)]
struct ConvergenceArgs {
    #[command(flatten)]
    sweep: SweepChoice,
    /// Dimension whose spacing `--h` sets.
    #[arg(long, default_value_t = 0)]
    axis: usize,
}

#[derive(Args, Debug)]
struct TransformTestArgs {
    #[arg(long, default_value_t = 64)]
    m: usize,
    #[arg(long, default_value_t = 48)]
    ne: usize,
    #[arg(long, default_value_t = 8)]
    p: usize,
    #[arg(long, default_value_t = 10)]
    q: usize,
    #[arg(long, default_value_t = 2)]
    nr: usize,
    #[arg(long, default_value_t = 1e-10)]
    eps: f64,
    #[arg(long, default_value_t = 20)]
    seeds: u64,
    #[arg(long, value_enum, default_value_t = CModeArg::Auto)]
    cmode: CModeArg,
    /// Skip the 2D blocks.
    #[arg(long)]
    no_2d: bool,
}

#[derive(clap::ValueEnum, Clone, Copy, Debug)]
enum CModeArg {
    Auto,
    Direct,
    Chebyshev,
}

impl From<CModeArg> for CMode {
    fn from(c: CModeArg) -> Self {
        match c {
            CModeArg::Auto => CMode::Auto,
            CModeArg::Direct => CMode::Direct,
            CModeArg::Chebyshev => CMode::Chebyshev,
        }
    }
}

#[derive(Args, Debug)]
struct ExampleArgs {
    /// example1, example2 (or example2a..example2e), example3, example4.
    name: String,
    /// Use the full step counts and grids instead of the desk-scale ones.
    #[arg(long)]
    full: bool,
}

#[derive(Args, Debug)]
struct DumpArgs {
    #[arg(long)]
    eps: Option<f64>,
    #[arg(long)]
    m: Option<usize>,
    #[arg(long, conflicts_with = "h")]
    ne: Option<usize>,
    /// Leg spacing; chosen from `eps`, `phimax` and `vnorm` when neither this nor `--ne` is given.
    #[arg(long)]
    h: Option<f64>,
    #[arg(long, default_value_t = 8)]
    p: usize,
    #[arg(long, default_value_t = 10)]
    q: usize,
    #[arg(long, default_value_t = 1)]
    nr: usize,
    #[arg(long, default_value_t = 1)]
    d: usize,
    #[arg(long, default_value_t = 0.0)]
    phimax: f64,
    #[arg(long, default_value_t = 0.0)]
    vnorm: f64,
    /// With `--config`, which dimension's contour to dump.
    #[arg(long, default_value_t = 0)]
    axis: usize,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match commands::dispatch(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
