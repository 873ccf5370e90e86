//! `sfrj convergence`: grid-refinement study of the engine solver.

use super::{load_config, parse_list, Context};
use crate::manifest::write_manifest;
use crate::CmdError;
use clap::Args as ClapArgs;
use serde::{Deserialize, Serialize};
use sfrj_core::engine::{
    grid_convergence_study, BoundaryCondition, EngineGeometry, GeometryConfig, SolverConfig,
};
use sfrj_core::gas::GasModel;
use sfrj_core::io::write_json;
use std::time::Instant;

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(default)]
pub struct Config {
    pub geometry: GeometryConfig,
    pub solver: SolverConfig,
}

#[derive(Debug, ClapArgs)]
pub struct Args {
    /// Cell counts, coarsest first.
    #[arg(long, default_value = "250,500,1000,2000")]
    counts: String,
    /// Heat fluxes for the study, W/m^2.
    #[arg(long, default_value = "6e6,10e6,14e6")]
    fluxes: String,
    #[arg(long)]
    config: Option<std::path::PathBuf>,
}

pub fn run(ctx: &Context, args: Args) -> Result<(), CmdError> {
    let config: Config = load_config(args.config.as_deref())?;
    let counts: Vec<usize> = parse_list(&args.counts)?
        .into_iter()
        .map(|v| v as usize)
        .collect();
    let fluxes = parse_list(&args.fluxes)?;
    if counts.len() < 3 {
        return Err(CmdError::Config("need at least three cell counts".into()));
    }
    let gas = GasModel::air();
    let geometry = EngineGeometry::build(config.geometry)
        .map_err(|e| CmdError::Config(e.to_string()))?;
    let bc = BoundaryCondition::nominal(&gas);
    let started = Instant::now();
    let study = grid_convergence_study(&counts, &fluxes, &geometry, bc, config.solver, gas)
        .map_err(|e| CmdError::Solver(e.to_string()))?;

    let mut csv = String::from("n_cells,flux,thrust,unstarted\n");
    for row in &study.rows {
        for &(flux, thrust, unstarted) in &row.sweep {
            csv.push_str(&format!("{},{},{},{}\n", row.n_cells, flux, thrust, unstarted));
        }
    }
    for (i, change) in study.successive_change.iter().enumerate() {
        println!(
            "{} -> {} cells: max relative thrust change {:.4}",
            study.rows[i].n_cells,
            study.rows[i + 1].n_cells,
            change
        );
    }
    match study.converged_cells {
        Some(n) => println!("declared converged resolution: {n} cells (< 1% change)"),
        None => println!("no resolution met the 1% criterion"),
    }

    let dir = ctx.out.join("convergence");
    std::fs::create_dir_all(&dir).map_err(|e| CmdError::Solver(e.to_string()))?;
    std::fs::write(dir.join("study.csv"), csv).map_err(|e| CmdError::Solver(e.to_string()))?;
    write_json(&dir.join("study.json"), &study).map_err(|e| CmdError::Solver(e.to_string()))?;
    write_manifest(
        &dir.join("manifest.json"),
        "convergence",
        ctx.seed,
        &config,
        started.elapsed().as_secs_f64(),
        serde_json::json!({
            "counts": counts,
            "converged_cells": study.converged_cells,
            "successive_change": study.successive_change,
        }),
    )
    .map_err(|e| CmdError::Solver(e.to_string()))?;
    Ok(())
}
