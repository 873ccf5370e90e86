//! `sfrj regulate`: one closed-loop thrust-regulation experiment.

use super::{get_calibration, load_config, Context};
use crate::manifest::write_manifest;
use crate::CmdError;
use clap::Args as ClapArgs;
use serde::{Deserialize, Serialize};
use sfrj_core::engine::{BoundaryCondition, EngineGeometry, GeometryConfig, SolverConfig};
use sfrj_core::gas::GasModel;
use sfrj_core::harness::{
    regulate, CommandMode, CommandProfile, FullEngineBackend, LoopConfig,
};
use std::time::Instant;

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct Config {
    pub geometry: GeometryConfig,
    pub solver: SolverConfig,
    pub loop_config: LoopConfig,
    /// Benchmark random-step band, mapped through the calibration in
    /// calibrated mode.
    pub random_band: (f64, f64),
    pub random_hold: u64,
}

impl Default for Config {
    fn default() -> Self {
        Self {
            geometry: GeometryConfig::default(),
            solver: SolverConfig::default(),
            loop_config: LoopConfig::default(),
            random_band: (300.0, 900.0),
            random_hold: 40,
        }
    }
}

#[derive(Debug, ClapArgs)]
pub struct Args {
    /// Command shape: "step" or "random".
    #[arg(long, default_value = "step")]
    command: String,
    /// Step target: a number in newtons (raw mode) or
    /// "calibrated-<percent>pct" of the pre-unstart span.
    #[arg(long, default_value = "calibrated-50pct")]
    target: String,
    #[arg(long)]
    steps: Option<u64>,
    #[arg(long)]
    inner: Option<u64>,
    #[arg(long)]
    p0: Option<f64>,
    #[arg(long)]
    n1: Option<f64>,
    #[arg(long)]
    cells: Option<usize>,
    /// Fail (exit 5) unless the run settles into the 2% band.
    #[arg(long)]
    gate: bool,
    #[arg(long)]
    config: Option<std::path::PathBuf>,
}

pub fn run(ctx: &Context, args: Args) -> Result<(), CmdError> {
    let mut config: Config = load_config(args.config.as_deref())?;
    if let Some(v) = args.steps {
        config.loop_config.control_steps = v;
    }
    if let Some(v) = args.inner {
        config.loop_config.inner_iterations = v;
    }
    if let Some(v) = args.p0 {
        config.loop_config.rcac.p0_scale = v;
    }
    if let Some(v) = args.n1 {
        config.loop_config.rcac.n1 = v;
    }
    if let Some(v) = args.cells {
        config.solver.n_cells = v;
    }

    let gas = GasModel::air();
    let geometry = EngineGeometry::build(config.geometry)
        .map_err(|e| CmdError::Config(e.to_string()))?;
    let started = Instant::now();

    // Resolve the command target and map constants.
    let calibrated = args.target.starts_with("calibrated");
    let (profile, mode) = if calibrated {
        let cal = get_calibration(ctx, &geometry, config.solver, gas)?;
        config.loop_config.map = cal.map_config();
        let profile = match args.command.as_str() {
            "step" => {
                let pct: f64 = args
                    .target
                    .trim_start_matches("calibrated-")
                    .trim_end_matches("pct")
                    .parse()
                    .map_err(|_| {
                        CmdError::Config(format!("bad --target {:?}", args.target))
                    })?;
                CommandProfile::Constant {
                    value: cal.span_fraction(pct / 100.0),
                }
            }
            "random" => CommandProfile::RandomSteps {
                lo: cal.map_command(config.random_band.0),
                hi: cal.map_command(config.random_band.1),
                hold: config.random_hold,
            },
            other => return Err(CmdError::Config(format!("unknown --command {other:?}"))),
        };
        (profile, CommandMode::Calibrated)
    } else {
        let profile = match args.command.as_str() {
            "step" => CommandProfile::Constant {
                value: args
                    .target
                    .parse()
                    .map_err(|_| CmdError::Config(format!("bad --target {:?}", args.target)))?,
            },
            "random" => CommandProfile::RandomSteps {
                lo: config.random_band.0,
                hi: config.random_band.1,
                hold: config.random_hold,
            },
            other => return Err(CmdError::Config(format!("unknown --command {other:?}"))),
        };
        (profile, CommandMode::RawNewtons)
    };
    config.loop_config.command_mode = mode;

    let bc = BoundaryCondition::nominal(&gas);
    let mut backend = FullEngineBackend::new(geometry, bc, config.solver, gas);
    let log = regulate(&mut backend, &profile, &config.loop_config, ctx.seed)
        .map_err(|e| CmdError::Solver(e.to_string()))?;

    let settling = log.settling_step(0.02, 10);
    let overshoot = log.peak_overshoot();
    println!(
        "regulation: {} steps, settling(2%) = {:?}, overshoot = {:.3}, final |z|/r = {:.3e}",
        log.steps.len(),
        settling,
        overshoot,
        log.final_relative_error()
    );

    let dir = ctx.out.join("regulate");
    std::fs::create_dir_all(&dir).map_err(|e| CmdError::Solver(e.to_string()))?;
    std::fs::write(dir.join("log.csv"), log.to_csv())
        .map_err(|e| CmdError::Solver(e.to_string()))?;
    write_manifest(
        &dir.join("manifest.json"),
        "regulate",
        ctx.seed,
        &config,
        started.elapsed().as_secs_f64(),
        serde_json::json!({
            "profile": profile,
            "settling_step": settling,
            "overshoot": overshoot,
            "final_relative_error": log.final_relative_error(),
            "final_theta": log.final_theta,
        }),
    )
    .map_err(|e| CmdError::Solver(e.to_string()))?;

    if args.gate && settling.is_none() {
        return Err(CmdError::Gate(
            "run never entered the sustained 2% band".into(),
        ));
    }
    Ok(())
}
