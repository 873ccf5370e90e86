//! `sfrj engage`: the planar missile-engagement scenario.

use super::{load_config, Context};
use crate::manifest::write_manifest;
use crate::CmdError;
use clap::Args as ClapArgs;
use serde::{Deserialize, Serialize};
use sfrj_core::engagement::{
    default_engagement_axes, prepare_engine, run_engagement, EngagementConfig, Outcome,
};
use sfrj_core::engine::{BoundaryCondition, OutletMode, SolverConfig};
use sfrj_core::envelope::flight_inlet;
use sfrj_core::gas::GasModel;
use sfrj_core::harness::{FullEngineBackend, SurrogateBackend};
use sfrj_core::io::write_json;
use std::time::Instant;

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct Config {
    pub engagement: EngagementConfig,
    pub solver: SolverConfig,
    pub table_altitudes: Vec<f64>,
    pub table_velocities: Vec<f64>,
    pub table_fluxes: Vec<f64>,
}

impl Default for Config {
    fn default() -> Self {
        let (table_altitudes, table_velocities, table_fluxes) = default_engagement_axes();
        Self {
            engagement: EngagementConfig::default(),
            solver: SolverConfig {
                n_cells: 300,
                max_iterations: 60_000,
                ..SolverConfig::default()
            },
            table_altitudes,
            table_velocities,
            table_fluxes,
        }
    }
}

#[derive(Debug, ClapArgs)]
pub struct Args {
    /// Scenario preset; "benchmark" is the reference engagement.
    #[arg(long, default_value = "benchmark")]
    preset: String,
    /// Engine backend: "surrogate" (envelope table) or "full" (solver in
    /// the loop).
    #[arg(long, default_value = "surrogate")]
    backend: String,
    /// Fail (exit 5) unless the intercept occurs.
    #[arg(long)]
    gate: bool,
    #[arg(long)]
    config: Option<std::path::PathBuf>,
}

pub fn run(ctx: &Context, args: Args) -> Result<(), CmdError> {
    let config: Config = load_config(args.config.as_deref())?;
    if args.preset != "benchmark" {
        return Err(CmdError::Config(format!("unknown --preset {:?}", args.preset)));
    }
    let gas = GasModel::air();
    let started = Instant::now();
    let engine = prepare_engine(
        &config.engagement,
        config.solver,
        gas,
        &config.table_altitudes,
        &config.table_velocities,
        &config.table_fluxes,
    )
    .map_err(|e| CmdError::Solver(e.to_string()))?;
    println!(
        "engine scale {:.3}; heat-flux map: w_bar = {:.3e}, k_w = {:.3e}, w_max = {:.3e}",
        engine.scale, engine.map.w_bar, engine.map.k_w, engine.map.w_max
    );

    let atmo = sfrj_core::atmosphere::isa(config.engagement.pursuer_altitude)
        .map_err(|e| CmdError::Config(e.to_string()))?;
    let v0 = config.engagement.pursuer_mach * gas.sound_speed(atmo.t);
    let log = match args.backend.as_str() {
        "surrogate" => {
            let mut backend = SurrogateBackend::new(
                engine.table.clone(),
                config.engagement.pursuer_altitude,
                v0,
            );
            run_engagement(&config.engagement, &mut backend, &engine.map)
        }
        "full" => {
            let inlet = flight_inlet(config.engagement.pursuer_altitude, v0)
                .map_err(|e| CmdError::Config(e.to_string()))?;
            let bc = BoundaryCondition::new(
                inlet,
                OutletMode::Auto {
                    back_pressure: inlet.pressure,
                },
                &gas,
            );
            let mut backend =
                FullEngineBackend::new(engine.geometry.clone(), bc, config.solver, gas);
            run_engagement(&config.engagement, &mut backend, &engine.map)
        }
        other => return Err(CmdError::Config(format!("unknown --backend {other:?}"))),
    }
    .map_err(|e| CmdError::Solver(e.to_string()))?;

    println!(
        "outcome: {:?}, miss distance {:.3} m at t = {:.3} s ({} rows)",
        log.outcome,
        log.miss_distance,
        log.intercept_time,
        log.rows.len()
    );

    let dir = ctx.out.join("engage");
    std::fs::create_dir_all(&dir).map_err(|e| CmdError::Solver(e.to_string()))?;
    std::fs::write(dir.join("trajectory.csv"), log.to_csv())
        .map_err(|e| CmdError::Solver(e.to_string()))?;
    write_json(&dir.join("engine.json"), &engine.map)
        .map_err(|e| CmdError::Solver(e.to_string()))?;
    write_manifest(
        &dir.join("manifest.json"),
        "engage",
        ctx.seed,
        &config,
        started.elapsed().as_secs_f64(),
        serde_json::json!({
            "backend": args.backend,
            "outcome": log.outcome,
            "miss_distance": log.miss_distance,
            "intercept_time": log.intercept_time,
            "engine_scale": engine.scale,
            "scaled_engine_note":
                "thrust command served by a geometrically scaled engine; static experiments use the nominal size",
        }),
    )
    .map_err(|e| CmdError::Solver(e.to_string()))?;
    if args.gate && log.outcome != Outcome::Intercept {
        return Err(CmdError::Gate(format!(
            "no intercept; closest approach {:.2} m",
            log.miss_distance
        )));
    }
    Ok(())
}
