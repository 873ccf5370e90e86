//! Command-line entry point for the SFRJ thrust-regulation laboratory.
//!
//! Every subcommand writes plain CSV/JSON artifacts plus a manifest that is
//! sufficient to reproduce the run exactly (resolved config, seed, crate
//! version, config fingerprint). Exit codes are stable: 0 success, 2 config
//! error, 3 solver or experiment failure, 4 missing prerequisite, 5 an
//! explicitly requested gate was missed.

mod commands;
mod manifest;

use clap::{Parser, Subcommand};
use std::path::PathBuf;
use std::process::ExitCode;

pub const EXIT_CONFIG: u8 = 2;
pub const EXIT_SOLVER: u8 = 3;
pub const EXIT_PREREQ: u8 = 4;
pub const EXIT_GATE: u8 = 5;

#[derive(Debug, Parser)]
#[command(name = "sfrj", version, about = "Quasi-1D SFRJ flow solver with adaptive thrust regulation")]
struct Cli {
    /// Output directory for artifacts (env: SFRJ_OUT).
    #[arg(long, global = true, env = "SFRJ_OUT", default_value = "out")]
    out: PathBuf,
    /// Base RNG seed.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Worker threads for parallel experiments (0 = all cores).
    #[arg(long, global = true, default_value_t = 0)]
    threads: usize,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Steady solves and the open-loop heat-flux sweep.
    OpenLoop(commands::open_loop::Args),
    /// Build the (altitude, velocity, heat flux) envelope table.
    Envelope(commands::envelope::Args),
    /// One closed-loop regulation experiment.
    Regulate(commands::regulate::Args),
    /// The 3x4 hyperparameter grid.
    Sweep(commands::sweep::Args),
    /// Monte-Carlo robustness studies (inlet or flight-envelope sampling).
    Montecarlo(commands::montecarlo::Args),
    /// Planar missile engagement with the engine in the loop.
    Engage(commands::engage::Args),
    /// Grid-convergence study of the engine solver.
    Convergence(commands::convergence::Args),
}

/// Command outcome mapped to the documented exit codes.
pub enum CmdError {
    Config(String),
    Solver(String),
    Prerequisite(String),
    Gate(String),
}

impl CmdError {
    fn report(self) -> ExitCode {
        let (code, kind, msg) = match self {
            CmdError::Config(m) => (EXIT_CONFIG, "config error", m),
            CmdError::Solver(m) => (EXIT_SOLVER, "solver failure", m),
            CmdError::Prerequisite(m) => (EXIT_PREREQ, "missing prerequisite", m),
            CmdError::Gate(m) => (EXIT_GATE, "gate missed", m),
        };
        eprintln!("sfrj: {kind}: {msg}");
        ExitCode::from(code)
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if cli.threads > 0 {
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(cli.threads)
            .build_global()
        {
            return CmdError::Config(format!("thread pool: {e}")).report();
        }
    }
    let ctx = commands::Context {
        out: cli.out,
        seed: cli.seed,
    };
    let result = match cli.command {
        Command::OpenLoop(args) => commands::open_loop::run(&ctx, args),
        Command::Envelope(args) => commands::envelope::run(&ctx, args),
        Command::Regulate(args) => commands::regulate::run(&ctx, args),
        Command::Sweep(args) => commands::sweep::run(&ctx, args),
        Command::Montecarlo(args) => commands::montecarlo::run(&ctx, args),
        Command::Engage(args) => commands::engage::run(&ctx, args),
        Command::Convergence(args) => commands::convergence::run(&ctx, args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => e.report(),
    }
}
