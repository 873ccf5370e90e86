//! `sfrj envelope`: build and persist the operating-envelope table.

use super::{load_config, parse_list, Context};
use crate::manifest::write_manifest;
use crate::CmdError;
use clap::Args as ClapArgs;
use serde::{Deserialize, Serialize};
use sfrj_core::engine::{EngineGeometry, GeometryConfig, SolverConfig};
use sfrj_core::envelope::{build_envelope, default_axes, SweepPolicy};
use sfrj_core::gas::GasModel;
use sfrj_core::io::write_json;
use std::time::Instant;

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct Config {
    pub geometry: GeometryConfig,
    pub solver: SolverConfig,
    pub altitudes: Vec<f64>,
    pub velocities: Vec<f64>,
    pub fluxes: Vec<f64>,
    pub policy: SweepPolicy,
}

impl Default for Config {
    fn default() -> Self {
        let (altitudes, velocities, fluxes) = default_axes();
        Self {
            geometry: GeometryConfig::default(),
            solver: SolverConfig::default(),
            altitudes,
            velocities,
            fluxes,
            policy: SweepPolicy::default(),
        }
    }
}

#[derive(Debug, ClapArgs)]
pub struct Args {
    /// Altitude grid, m (comma separated).
    #[arg(long)]
    alts: Option<String>,
    /// Velocity grid, m/s.
    #[arg(long)]
    vels: Option<String>,
    /// Heat-flux grid, W/m^2.
    #[arg(long)]
    fluxes: Option<String>,
    #[arg(long)]
    cells: Option<usize>,
    #[arg(long)]
    config: Option<std::path::PathBuf>,
}

pub fn run(ctx: &Context, args: Args) -> Result<(), CmdError> {
    let mut config: Config = load_config(args.config.as_deref())?;
    if let Some(s) = args.alts.as_deref() {
        config.altitudes = parse_list(s)?;
    }
    if let Some(s) = args.vels.as_deref() {
        config.velocities = parse_list(s)?;
    }
    if let Some(s) = args.fluxes.as_deref() {
        config.fluxes = parse_list(s)?;
    }
    if let Some(cells) = args.cells {
        config.solver.n_cells = cells;
    }
    let gas = GasModel::air();
    let geometry = EngineGeometry::build(config.geometry)
        .map_err(|e| CmdError::Config(e.to_string()))?;
    let started = Instant::now();
    let table = build_envelope(
        &geometry,
        config.solver,
        gas,
        &config.altitudes,
        &config.velocities,
        &config.fluxes,
        config.policy,
    )
    .map_err(|e| CmdError::Solver(e.to_string()))?;

    println!("max feasible thrust per (altitude, velocity):");
    for (ia, &alt) in table.altitudes.iter().enumerate() {
        for (iv, &vel) in table.velocities.iter().enumerate() {
            match table.max_thrust_at(ia, iv) {
                Some(t) => println!("  h = {alt:>7.0} m  v = {vel:>6.0} m/s  max thrust = {t:>9.1} N"),
                None => println!("  h = {alt:>7.0} m  v = {vel:>6.0} m/s  no started point"),
            }
        }
    }

    let dir = ctx.out.join("envelope");
    std::fs::create_dir_all(&dir).map_err(|e| CmdError::Solver(e.to_string()))?;
    write_json(&dir.join("envelope.json"), &table).map_err(|e| CmdError::Solver(e.to_string()))?;
    std::fs::write(dir.join("envelope.csv"), table.to_csv())
        .map_err(|e| CmdError::Solver(e.to_string()))?;
    write_manifest(
        &dir.join("manifest.json"),
        "envelope",
        ctx.seed,
        &config,
        started.elapsed().as_secs_f64(),
        serde_json::json!({
            "grid_points": table.altitudes.len() * table.velocities.len(),
        }),
    )
    .map_err(|e| CmdError::Solver(e.to_string()))?;
    println!("envelope table written to {}", dir.join("envelope.json").display());
    Ok(())
}
