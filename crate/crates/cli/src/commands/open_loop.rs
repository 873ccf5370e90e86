//! `sfrj open-loop`: single steady solves and the heat-flux sweep.

use super::{load_config, Context};
use crate::manifest::write_manifest;
use crate::CmdError;
use clap::Args as ClapArgs;
use serde::{Deserialize, Serialize};
use sfrj_core::engine::{BoundaryCondition, EngineGeometry, EngineSolver, GeometryConfig, SolverConfig};
use sfrj_core::envelope::{default_flux_grid, heat_flux_sweep, SweepPolicy};
use sfrj_core::gas::GasModel;
use sfrj_core::io::{write_json, write_steady_result};
use std::time::Instant;

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(default)]
pub struct Config {
    pub geometry: GeometryConfig,
    pub solver: SolverConfig,
    /// Fluxes for `--sweep`; empty means the default grid.
    pub fluxes: Vec<f64>,
    pub policy: SweepPolicy,
}

#[derive(Debug, ClapArgs)]
pub struct Args {
    /// Solve one steady state at this wall heat flux (W/m^2).
    #[arg(long)]
    flux: Option<f64>,
    /// Run the ascending heat-flux sweep (default grid unless configured).
    #[arg(long)]
    sweep: bool,
    /// Grid cells.
    #[arg(long)]
    cells: Option<usize>,
    /// JSON config file (flags override file entries).
    #[arg(long)]
    config: Option<std::path::PathBuf>,
}

#[derive(Debug, Serialize)]
struct Summary {
    thrust: Option<f64>,
    converged: Option<bool>,
    unstarted: Option<bool>,
    sweep_points: usize,
    first_unstart_flux: Option<f64>,
}

pub fn run(ctx: &Context, args: Args) -> Result<(), CmdError> {
    let mut config: Config = load_config(args.config.as_deref())?;
    if let Some(cells) = args.cells {
        config.solver.n_cells = cells;
    }
    if !args.sweep && args.flux.is_none() {
        return Err(CmdError::Config(
            "pass --flux <W/m^2> for a single solve or --sweep".into(),
        ));
    }
    let gas = GasModel::air();
    let geometry = EngineGeometry::build(config.geometry)
        .map_err(|e| CmdError::Config(e.to_string()))?;
    let bc = BoundaryCondition::nominal(&gas);
    let started = Instant::now();
    let dir = ctx.out.join("open_loop");

    let mut summary = Summary {
        thrust: None,
        converged: None,
        unstarted: None,
        sweep_points: 0,
        first_unstart_flux: None,
    };

    if let Some(flux) = args.flux {
        let mut solver = EngineSolver::new(geometry.clone(), bc, config.solver, gas);
        let result = solver
            .run_to_steady(flux)
            .map_err(|e| CmdError::Solver(e.to_string()))?;
        let grid = solver.grid();
        write_steady_result(
            &dir,
            &format!("flux_{:.0}", flux),
            &grid.x_centers,
            &grid.area_centers,
            &result,
        )
        .map_err(|e| CmdError::Solver(e.to_string()))?;
        println!(
            "flux {flux:.3e} W/m^2: thrust {:.1} N, converged {}, unstarted {}",
            result.thrust,
            result.converged,
            result.unstarted()
        );
        summary.thrust = Some(result.thrust);
        summary.converged = Some(result.converged);
        summary.unstarted = Some(result.unstarted());
    }

    if args.sweep {
        let fluxes = if config.fluxes.is_empty() {
            default_flux_grid()
        } else {
            config.fluxes.clone()
        };
        let sweep = heat_flux_sweep(&geometry, bc, config.solver, gas, &fluxes, config.policy);
        let mut csv = String::from("flux,thrust,thrust_mean,unstarted,converged\n");
        for p in &sweep.points {
            csv.push_str(&format!(
                "{},{},{},{},{}\n",
                p.flux, p.thrust, p.thrust_mean, p.unstarted, p.converged
            ));
            println!(
                "q = {:>7.3e}  thrust = {:>9.1} N  unstarted = {}  converged = {}",
                p.flux, p.thrust, p.unstarted, p.converged
            );
        }
        std::fs::create_dir_all(&dir).map_err(|e| CmdError::Solver(e.to_string()))?;
        std::fs::write(dir.join("sweep.csv"), csv).map_err(|e| CmdError::Solver(e.to_string()))?;
        write_json(&dir.join("sweep.json"), &sweep).map_err(|e| CmdError::Solver(e.to_string()))?;
        summary.sweep_points = sweep.points.len();
        summary.first_unstart_flux = sweep.first_unstart.map(|i| sweep.points[i].flux);
    }

    write_manifest(
        &dir.join("manifest.json"),
        "open-loop",
        ctx.seed,
        &config,
        started.elapsed().as_secs_f64(),
        summary,
    )
    .map_err(|e| CmdError::Solver(e.to_string()))?;
    Ok(())
}
