//! `ftails`: calibrate, run and simulate the frontier tail tests.

mod commands;
mod failure;
mod input;
mod manifest;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser, Debug)]
#[command(name = "ftails", version, about = "Extreme-value tail tests for stochastic frontier errors")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Compute critical values (and least favorable weights) once and store them.
    Calibrate(CalibrateArgs),
    /// Run the thin-tail test on OLS residual tails of a CSV dataset.
    Test(TestArgs),
    /// Rejection frequencies of simulated scenarios.
    Simulate(SimulateArgs),
    /// Evaluate the density of the self-normalized top-k limit.
    Density(DensityArgs),
    /// Power of the thin-tail test under the limiting law.
    Power(PowerArgs),
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum KindArg {
    Thin,
    Equal,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum OrientationArg {
    Production,
    Cost,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum TailsArg {
    Left,
    Right,
    Both,
}

#[derive(Args, Debug)]
pub struct StoreArg {
    /// Calibration directory.
    #[arg(long = "calibrations", env = "FTAILS_CALIBRATION_DIR", default_value = "calibrations")]
    pub dir: PathBuf,
}

#[derive(Args, Debug)]
pub struct CalibrateArgs {
    #[arg(long, value_enum)]
    pub kind: KindArg,
    /// Tail sizes, comma separated.
    #[arg(long, value_delimiter = ',', required = true)]
    pub k: Vec<usize>,
    #[arg(long, default_value_t = 0.05)]
    pub alpha: f64,
    /// Null draws (thin) or proposal draws (equal).
    #[arg(long, default_value_t = 10_000)]
    pub draws: usize,
    /// Least favorable weight iterations (equal only).
    #[arg(long, default_value_t = 500)]
    pub iterations: usize,
    /// Initial step length of the weight iteration (equal only).
    #[arg(long, default_value_t = 2.0)]
    pub kappa: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[command(flatten)]
    pub store: StoreArg,
}

#[derive(Args, Debug)]
pub struct TestArgs {
    /// CSV file with a header row.
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long)]
    pub response: String,
    /// Regressor columns; the intercept is added automatically.
    #[arg(long, value_delimiter = ',')]
    pub design: Vec<String>,
    /// Column whose values split the sample into separate regressions.
    #[arg(long)]
    pub group: Option<String>,
    #[arg(long, value_enum, default_value_t = OrientationArg::Production)]
    pub orientation: OrientationArg,
    #[arg(long, value_delimiter = ',', default_values_t = [25usize, 50, 75, 100])]
    pub k: Vec<usize>,
    #[arg(long, value_enum, default_value_t = TailsArg::Both)]
    pub tails: TailsArg,
    #[arg(long, default_value_t = 0.05)]
    pub alpha: f64,
    #[command(flatten)]
    pub store: StoreArg,
    /// Add a `p_display` column showing p-values above 0.1 as `>0.1`.
    #[arg(long)]
    pub censor: bool,
    /// Output CSV; stdout when absent.
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct SimulateArgs {
    /// Scenario file (JSON).
    #[arg(long, conflicts_with = "preset", required_unless_present = "preset")]
    pub config: Option<PathBuf>,
    /// Built-in design: table1, table2, table3 or table4.
    #[arg(long)]
    pub preset: Option<String>,
    /// Replications per cell, overriding the scenario file.
    #[arg(long)]
    pub reps: Option<usize>,
    /// Root seed, overriding the scenario file.
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long, default_value_t = 0.05)]
    pub alpha: f64,
    #[command(flatten)]
    pub store: StoreArg,
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct DensityArgs {
    #[arg(long)]
    pub k: usize,
    /// Tail indices, comma separated.
    #[arg(long, value_delimiter = ',', default_values_t = [0.0])]
    pub xi: Vec<f64>,
    /// The k-2 interior coordinates of the normalized tail, descending.
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    pub v: Vec<f64>,
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct PowerArgs {
    #[arg(long, value_delimiter = ',', required = true)]
    pub k: Vec<usize>,
    #[arg(long, default_value_t = 0.05)]
    pub alpha: f64,
    /// Draws per tail index.
    #[arg(long, default_value_t = 10_000)]
    pub draws: usize,
    #[arg(long, value_delimiter = ',', default_values_t = [0.0, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9])]
    pub xi: Vec<f64>,
    /// Null draws behind the critical value when no stored calibration exists.
    #[arg(long, default_value_t = 10_000)]
    pub null_draws: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[command(flatten)]
    pub store: StoreArg,
    #[arg(long)]
    pub output: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Calibrate(a) => commands::calibrate(&a),
        Command::Test(a) => commands::test(&a),
        Command::Simulate(a) => commands::simulate(&a),
        Command::Density(a) => commands::density(&a),
        Command::Power(a) => commands::power(&a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {f}");
            ExitCode::from(f.exit as u8)
        }
    }
}
