//! `ctqc`: batch runner for the continuous-time quantum coding experiments.
//!
//! The binary is a thin wrapper around [`run`], which tests can also call in-process.

mod commands;
mod config;
mod grid;
mod table;

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use grid::Grid;

#[derive(Parser, Debug)]
#[command(name = "ctqc", version, about = "Continuous-time quantum coding experiments")]
#[command(args_override_self = true, subcommand_required = false, arg_required_else_help = true)]
struct Cli {
    /// JSON object mirroring the command line; `"command"` names the subcommand.
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,

    /// Write results here instead of standard output.
    #[arg(long, global = true, value_name = "PATH")]
    out: Option<PathBuf>,

    #[arg(long, global = true, value_enum)]
    format: Option<Format>,

    #[arg(long, global = true, default_value_t = ctqc::acceptance::DEFAULT_SEED)]
    seed: u64,

    /// Same as the `selftest` subcommand.
    #[arg(long)]
    selftest: bool,

    #[command(subcommand)]
    command: Option<Command>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Upper (and optionally lower) capacity bounds for a depolarizing generator.
    DepolarizingBounds(DepolarizingArgs),
    /// Five-qubit code under continuous correction against the bound f(5t, r/5).
    FiveQubitContinuous(GridArgs),
    /// Classical three-bit repetition code against f(3t, r/3).
    ClassicalRepetition(GridArgs),
    /// Haar Monte-Carlo decoupling runs with their min-entropy bound.
    DecouplingMc(DecouplingArgs),
    /// The surface f(t, r).
    FSurface(GridArgs),
    /// Entropy inequalities and min-entropy SDP checks.
    EntropyChecks,
    /// Run the acceptance suite and write its results.
    Selftest,
}

#[derive(Args, Debug)]
struct GridArgs {
    /// Times, as `start:stop:step` or a comma-separated list.
    #[arg(long)]
    t: Grid,
    /// Correction rates, same syntax.
    #[arg(long)]
    r: Grid,
}

#[derive(Args, Debug)]
struct DepolarizingArgs {
    #[arg(long)]
    r: Grid,
    #[arg(long)]
    t: Grid,
    #[arg(long, default_value_t = 2)]
    d: usize,
    /// Diagonal of the fixed point ρ₀; defaults to I/d.
    #[arg(long, value_delimiter = ',')]
    rho0: Option<Vec<f64>>,
    /// Also evaluate the fixed-point lower bound, maximized over k ≤ K.
    #[arg(long, value_name = "K")]
    k_max: Option<usize>,
    #[arg(long, default_value_t = 1.0)]
    c: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Family {
    /// ρ ↦ λρ + (1−λ)I/2.
    Depolarizing,
    /// Amplitude damping with decay probability γ.
    AmplitudeDamping,
    /// The fixed ten-instance suite; `--param` is ignored.
    Suite,
}

#[derive(Args, Debug)]
struct DecouplingArgs {
    #[arg(long, value_enum, default_value_t = Family::Suite)]
    family: Family,
    /// λ or γ values.
    #[arg(long)]
    param: Option<Grid>,
    /// Haar samples per run.
    #[arg(long, default_value_t = 200)]
    n: usize,
}

fn configure_threads() -> Result<(), String> {
    let Ok(raw) = std::env::var("THREADS") else { return Ok(()) };
    let n: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| format!("THREADS must be a positive integer, got `{raw}`"))?;
    rayon::ThreadPoolBuilder::new().num_threads(n).build_global().map_err(|e| e.to_string())
}

/// Runs the CLI on a full argument vector (program name first) and returns the exit status.
pub fn run(args: Vec<String>) -> u8 {
    let argv = match config::expand(args) {
        Ok(a) => a,
        Err(e) => {
            eprintln!("error: {e}");
            return 2;
        }
    };
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return e.exit_code() as u8;
        }
    };
    if let Err(e) = configure_threads() {
        eprintln!("error: {e}");
        return 2;
    }
    let command = match (cli.selftest, cli.command) {
        (true, None | Some(Command::Selftest)) => Command::Selftest,
        (true, Some(_)) => {
            eprintln!("error: --selftest cannot be combined with another subcommand");
            return 2;
        }
        (false, Some(c)) => c,
        (false, None) => {
            eprintln!("error: a subcommand is required (see --help)");
            return 2;
        }
    };
    let ctx = commands::Context { out: cli.out, format: cli.format, seed: cli.seed };
    match commands::run(command, &ctx) {
        Ok(true) => 0,
        Ok(false) => 1,
        Err(e) => {
            eprintln!("error: {e:#}");
            1
        }
    }
}
