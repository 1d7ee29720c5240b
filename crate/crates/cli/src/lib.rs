//! Command-line front end for oracle games: analysis reports, equilibrium
//! solving with optional verification, parameter sweeps, oracle normalization
//! and Monte-Carlo simulation.

use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use oracle_games::OracleFamily;

mod commands;
pub mod error;
pub mod files;
pub mod format;

pub use error::CliError;

#[derive(Debug, Parser)]
#[command(
    name = "oracle-games",
    version,
    about = "Equilibria of games with a purchasable oracle"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Nodes, intervals, value of information and s_a(I) formulas of a game
    Analyze(AnalyzeArgs),
    /// Equilibrium {s_a, s_b, x} for a game and an oracle function
    Solve(SolveArgs),
    /// Equilibria along a one-parameter oracle family, as CSV
    Sweep(SweepArgs),
    /// Equivalent continuous, nondecreasing, concave oracle function
    Normalize(NormalizeArgs),
    /// Monte-Carlo play of the oracle game at a profile
    Simulate(SimulateArgs),
}

#[derive(Debug, Args)]
pub struct AnalyzeArgs {
    pub game: PathBuf,
    /// Oracle file; adds payment positions of the nodes
    pub oracle: Option<PathBuf>,
    /// Print JSON instead of text
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Args)]
pub struct SolveArgs {
    pub game: PathBuf,
    pub oracle: PathBuf,
    /// Check the result by deviation search and simulation; exit 4 on failure
    #[arg(long)]
    pub verify: bool,
    /// Simulated rounds for --verify
    #[arg(long, default_value_t = 1_000_000)]
    pub trials: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    pub game: PathBuf,
    /// Oracle family: sqrt_k (I = sqrt(k x)) or linear_slope (I = min(k x, 1))
    #[arg(long, default_value = "sqrt_k")]
    pub family: OracleFamily,
    #[arg(long)]
    pub k_from: f64,
    #[arg(long)]
    pub k_to: f64,
    #[arg(long, default_value_t = 200)]
    pub steps: usize,
    /// Payment cap; defaults to A's payoff range
    #[arg(long)]
    pub x_cap: Option<f64>,
    /// CSV destination; standard output when absent
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Worker threads, 0 for one per core
    #[arg(long, env = "ORACLE_GAMES_JOBS", default_value_t = 0)]
    pub jobs: usize,
    /// Run the deviation check on every row; exit 4 if any fails
    #[arg(long)]
    pub verify: bool,
}

#[derive(Debug, Args)]
pub struct NormalizeArgs {
    /// Oracle file, or a file with `samples = [[x, I], ...]`
    pub input: PathBuf,
    /// Game used for the default cap and, when I(0) > 0, for the shifted game
    #[arg(long)]
    pub game: Option<PathBuf>,
    /// Normalized oracle destination; standard output when absent
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// CSV with the series x, I, J1 (running maximum) and J (concave hull)
    #[arg(long)]
    pub plot_data: Option<PathBuf>,
    /// Destination of the shifted game; standard output when absent
    #[arg(long)]
    pub shifted_game: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    pub game: PathBuf,
    pub oracle: PathBuf,
    #[arg(long, default_value_t = 1_000_000)]
    pub trials: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// A's tentative strategy as comma-separated probabilities; solved when absent
    #[arg(long, requires_all = ["s_b", "x"])]
    pub s_a: Option<String>,
    #[arg(long, requires_all = ["s_a", "x"])]
    pub s_b: Option<String>,
    /// Payment to the oracle
    #[arg(long, requires_all = ["s_a", "s_b"])]
    pub x: Option<f64>,
    #[arg(long)]
    pub json: bool,
}

/// Runs one command, writing results to `out` and notes to `notes`.
pub fn run(cli: &Cli, out: &mut dyn Write, notes: &mut dyn Write) -> Result<(), CliError> {
    match &cli.command {
        Command::Analyze(a) => commands::analyze(a, out, notes),
        Command::Solve(a) => commands::solve(a, out, notes),
        Command::Sweep(a) => commands::sweep(a, out, notes),
        Command::Normalize(a) => commands::normalize(a, out, notes),
        Command::Simulate(a) => commands::simulate(a, out, notes),
    }
}
