//! `sfrj montecarlo`: inlet-condition and flight-envelope robustness runs.

use super::{get_calibration, load_config, Context};
use crate::manifest::write_manifest;
use crate::CmdError;
use clap::Args as ClapArgs;
use serde::{Deserialize, Serialize};
use sfrj_core::engine::{EngineGeometry, GeometryConfig, SolverConfig};
use sfrj_core::envelope::EnvelopeTable;
use sfrj_core::gas::GasModel;
use sfrj_core::harness::{
    monte_carlo_envelope, monte_carlo_inlet, CommandMode, InletRanges, LoopConfig, MonteCarloRun,
};
use std::time::Instant;

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct Config {
    pub geometry: GeometryConfig,
    pub solver: SolverConfig,
    pub loop_config: LoopConfig,
    pub inlet_ranges: InletRanges,
    pub altitude_range: (f64, f64),
    pub velocity_range: (f64, f64),
    /// Benchmark-scale thrust band for the envelope mode, mapped through the
    /// calibration.
    pub thrust_band: (f64, f64),
}

impl Default for Config {
    fn default() -> Self {
        Self {
            geometry: GeometryConfig::default(),
            solver: SolverConfig::default(),
            loop_config: LoopConfig::default(),
            inlet_ranges: InletRanges::benchmark(),
            altitude_range: (5_000.0, 10_000.0),
            velocity_range: (800.0, 1_000.0),
            thrust_band: (400.0, 800.0),
        }
    }
}

#[derive(Debug, ClapArgs)]
pub struct Args {
    /// "inlet" (velocity/temperature/pressure sampling) or "envelope"
    /// (altitude/velocity/thrust sampling against the lookup table).
    #[arg(long, default_value = "inlet")]
    mode: String,
    #[arg(long, default_value_t = 15)]
    samples: u64,
    /// Envelope table from a prior `sfrj envelope` run (envelope mode).
    #[arg(long)]
    table: Option<std::path::PathBuf>,
    #[arg(long)]
    cells: Option<usize>,
    #[arg(long)]
    steps: Option<u64>,
    /// Fail (exit 5) unless every run settles into the 2% band.
    #[arg(long)]
    gate: bool,
    #[arg(long)]
    config: Option<std::path::PathBuf>,
}

fn write_runs(dir: &std::path::Path, runs: &[MonteCarloRun]) -> Result<(), CmdError> {
    std::fs::create_dir_all(dir).map_err(|e| CmdError::Solver(e.to_string()))?;
    let mut summary = String::from(
        "sample,velocity,temperature,pressure,command,rejections,final_rel_error,K_P,K_I\n",
    );
    for run in runs {
        summary.push_str(&format!(
            "{},{},{},{},{},{},{},{},{}\n",
            run.sample_index,
            run.inlet.velocity,
            run.inlet.temperature,
            run.inlet.pressure,
            run.command,
            run.rejections,
            run.final_relative_error,
            run.converged_theta[0],
            run.converged_theta[1]
        ));
        std::fs::write(
            dir.join(format!("log_{:02}.csv", run.sample_index)),
            run.log.to_csv(),
        )
        .map_err(|e| CmdError::Solver(e.to_string()))?;
    }
    std::fs::write(dir.join("samples.csv"), summary).map_err(|e| CmdError::Solver(e.to_string()))
}

pub fn run(ctx: &Context, args: Args) -> Result<(), CmdError> {
    let mut config: Config = load_config(args.config.as_deref())?;
    if let Some(v) = args.cells {
        config.solver.n_cells = v;
    }
    if let Some(v) = args.steps {
        config.loop_config.control_steps = v;
    }
    let gas = GasModel::air();
    let geometry = EngineGeometry::build(config.geometry)
        .map_err(|e| CmdError::Config(e.to_string()))?;
    let started = Instant::now();

    // Check prerequisites before paying for the calibration sweep.
    let table: Option<EnvelopeTable> = if args.mode == "envelope" {
        let table_path = args.table.as_ref().ok_or_else(|| {
            CmdError::Prerequisite(
                "envelope mode needs --table <envelope.json> from a prior `sfrj envelope` run"
                    .into(),
            )
        })?;
        let text = std::fs::read_to_string(table_path)
            .map_err(|e| CmdError::Prerequisite(format!("{}: {e}", table_path.display())))?;
        Some(
            serde_json::from_str(&text)
                .map_err(|e| CmdError::Prerequisite(format!("{}: {e}", table_path.display())))?,
        )
    } else {
        None
    };

    let cal = get_calibration(ctx, &geometry, config.solver, gas)?;
    config.loop_config.map = cal.map_config();
    config.loop_config.command_mode = CommandMode::Calibrated;

    let (runs, dir) = match args.mode.as_str() {
        "inlet" => {
            let command = cal.span_fraction(0.5);
            let runs = monte_carlo_inlet(
                args.samples,
                config.inlet_ranges,
                command,
                ctx.seed,
                &geometry,
                config.solver,
                gas,
                &config.loop_config,
            )
            .map_err(|e| CmdError::Solver(e.to_string()))?;
            (runs, ctx.out.join("montecarlo_inlet"))
        }
        "envelope" => {
            let table = table.expect("loaded above for envelope mode");
            // Sampling ranges restricted to the table axes: feasibility
            // queries never extrapolate.
            let clamp = |range: (f64, f64), axis: &[f64]| -> Result<(f64, f64), CmdError> {
                let lo = range.0.max(axis[0]);
                let hi = range.1.min(*axis.last().unwrap());
                if lo >= hi {
                    return Err(CmdError::Config(format!(
                        "sampling range {range:?} lies outside the table axis [{}, {}]",
                        axis[0],
                        axis.last().unwrap()
                    )));
                }
                Ok((lo, hi))
            };
            config.altitude_range = clamp(config.altitude_range, &table.altitudes)?;
            config.velocity_range = clamp(config.velocity_range, &table.velocities)?;
            let band = (
                cal.map_command(config.thrust_band.0),
                cal.map_command(config.thrust_band.1),
            );
            let runs = monte_carlo_envelope(
                args.samples,
                config.altitude_range,
                config.velocity_range,
                band,
                ctx.seed,
                &table,
                &geometry,
                config.solver,
                gas,
                &config.loop_config,
            )
            .map_err(|e| CmdError::Solver(e.to_string()))?;
            (runs, ctx.out.join("montecarlo_envelope"))
        }
        other => return Err(CmdError::Config(format!("unknown --mode {other:?}"))),
    };

    let mut settled = 0usize;
    for run in &runs {
        let ok = run.log.settling_step(0.02, 10).is_some();
        settled += ok as usize;
        println!(
            "sample {:02}: v = {:6.1}  T = {:5.1}  p = {:7.0}  command = {:8.1}  rejections = {}  final |z|/r = {:.2e}  settled = {}",
            run.sample_index,
            run.inlet.velocity,
            run.inlet.temperature,
            run.inlet.pressure,
            run.command,
            run.rejections,
            run.final_relative_error,
            ok
        );
    }
    write_runs(&dir, &runs)?;
    write_manifest(
        &dir.join("manifest.json"),
        "montecarlo",
        ctx.seed,
        &config,
        started.elapsed().as_secs_f64(),
        serde_json::json!({
            "mode": args.mode,
            "samples": runs.len(),
            "settled": settled,
            "total_rejections": runs.iter().map(|r| r.rejections).sum::<u64>(),
        }),
    )
    .map_err(|e| CmdError::Solver(e.to_string()))?;
    if args.gate && settled != runs.len() {
        return Err(CmdError::Gate(format!(
            "{settled}/{} runs settled into the 2% band",
            runs.len()
        )));
    }
    Ok(())
}
