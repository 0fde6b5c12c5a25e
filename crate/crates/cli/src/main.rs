//! `verhulst`: densities, Laplace transforms, simulation and the validation
//! suite for the Verhulst process, from the command line.
//!
//! Exit codes: 0 success, 1 a validation check failed, 2 usage or domain error.

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(
    name = "verhulst",
    version,
    about = "Exact laws and Monte Carlo oracles for the Verhulst process"
)]
pub struct Cli {
    /// Seed for every random draw; drawn from entropy and echoed when absent.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Maximum number of worker threads (results do not depend on it).
    #[arg(long, global = true, value_parser = clap::value_parser!(u64).range(1..))]
    pub threads: Option<u64>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate a density on a grid and write it as CSV.
    Density(DensityArgs),
    /// Estimate E exp(-lambda theta_t) three independent ways.
    Laplace(LaplaceArgs),
    /// Simulate paths or terminal values of the process.
    Simulate(SimulateArgs),
    /// Run the validation suite and write a report CSV.
    Validate(ValidateArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum DensityKind {
    /// Density of exp(B_t + mu t).
    Lognormal,
    /// Exact density of theta_t(x) for mu = -1/2.
    ExactHalf,
    /// Density of theta at an independent exponential time of rate lambda.
    ExpTime,
    /// General-drift density by kernel Monte Carlo (start 1, crowding gamma).
    GeneralMc,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum VariantArg {
    /// a_t from free paths.
    Unconditional,
    /// a_t from bridges pinned at the endpoint.
    EndpointConditional,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum HorizonArg {
    /// Kernel time t.
    Literal,
    /// Kernel time t/4.
    Rescaled,
}

/// Quadrature settings.
#[derive(Debug, Clone, Args)]
pub struct QuadArgs {
    /// Absolute tolerance of the Theta quadrature.
    #[arg(long, default_value_t = 1e-10)]
    pub abs_tol: f64,
    /// Relative tolerance of the Theta quadrature.
    #[arg(long, default_value_t = 1e-8)]
    pub rel_tol: f64,
    /// Smallest t at which Theta is evaluated.
    #[arg(long, default_value_t = 0.2)]
    pub t_min_theta: f64,
}

#[derive(Debug, Clone, Args)]
pub struct DensityArgs {
    #[arg(long, value_enum)]
    pub kind: DensityKind,
    /// Drift (lognormal and general-mc).
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub mu: f64,
    /// Horizon.
    #[arg(long, default_value_t = 1.0)]
    pub t: f64,
    /// Start value (exact-half and exp-time).
    #[arg(long, default_value_t = 1.0)]
    pub x: f64,
    /// Exponential-time rate (exp-time).
    #[arg(long, default_value_t = 1.0)]
    pub lambda: f64,
    /// Crowding (general-mc).
    #[arg(long, default_value_t = 1.0)]
    pub gamma: f64,
    /// Number of grid points.
    #[arg(long)]
    pub points: Option<usize>,
    /// Lower end of the grid.
    #[arg(long)]
    pub lo: Option<f64>,
    /// Upper end of the grid.
    #[arg(long)]
    pub hi: Option<f64>,
    /// Kernel replicates per point (general-mc).
    #[arg(long, default_value_t = 10_000)]
    pub n: u64,
    /// Grid steps for a_t (general-mc).
    #[arg(long, default_value_t = 400)]
    pub steps: usize,
    /// Law of a_t (general-mc).
    #[arg(long, value_enum, default_value_t = VariantArg::EndpointConditional)]
    pub variant: VariantArg,
    #[command(flatten)]
    pub quad: QuadArgs,
    /// Output CSV; standard output when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct LaplaceArgs {
    #[arg(long)]
    pub lambda: f64,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub mu: f64,
    #[arg(long, default_value_t = 1.0)]
    pub beta: f64,
    /// Start value.
    #[arg(long, default_value_t = 1.0)]
    pub x0: f64,
    #[arg(long, default_value_t = 1.0)]
    pub t: f64,
    /// Replicates per estimator.
    #[arg(long, default_value_t = 100_000)]
    pub n: u64,
    /// Path step of the functional and direct estimators.
    #[arg(long, default_value_t = 1e-3)]
    pub dt: f64,
    /// Kernel time of the squared-Bessel estimator.
    #[arg(long, value_enum, default_value_t = HorizonArg::Rescaled)]
    pub horizon: HorizonArg,
    /// Optional CSV copy of the table.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct SimulateArgs {
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub mu: f64,
    #[arg(long, default_value_t = 0.0)]
    pub beta: f64,
    #[arg(long, default_value_t = 1.0)]
    pub x0: f64,
    /// Use the mu = -1/2, beta = x0 = x normalisation with this x.
    #[arg(long, conflicts_with_all = ["mu", "beta", "x0"])]
    pub x: Option<f64>,
    #[arg(long, default_value_t = 1.0)]
    pub t: f64,
    #[arg(long, default_value_t = 1e-3)]
    pub dt: f64,
    /// Replicates; 1 writes the full path, more write terminal values.
    #[arg(long, default_value_t = 1)]
    pub n: u64,
    /// Write the Euler-Maruyama path instead of the exact functional (n = 1).
    #[arg(long)]
    pub euler: bool,
    /// Output CSV.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Args)]
pub struct ValidateArgs {
    /// Run only these checks (repeatable or comma-separated).
    #[arg(long, value_delimiter = ',')]
    pub only: Vec<String>,
    /// Multiplier on Monte Carlo sample counts.
    #[arg(long, default_value_t = 1.0)]
    pub scale: f64,
    /// Report CSV.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    ExitCode::from(commands::run(cli))
}
