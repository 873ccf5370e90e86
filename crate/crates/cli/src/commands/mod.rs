//! Subcommand implementations.

pub mod convergence;
pub mod engage;
pub mod envelope;
pub mod montecarlo;
pub mod open_loop;
pub mod regulate;
pub mod sweep;

use crate::CmdError;
use serde::de::DeserializeOwned;
use std::path::{Path, PathBuf};

pub struct Context {
    pub out: PathBuf,
    pub seed: u64,
}

/// Load a JSON config file or fall back to defaults; flags are applied on
/// top by each command (flags > file > defaults).
pub fn load_config<T: DeserializeOwned + Default>(path: Option<&Path>) -> Result<T, CmdError> {
    match path {
        None => Ok(T::default()),
        Some(p) => {
            let text = std::fs::read_to_string(p)
                .map_err(|e| CmdError::Config(format!("{}: {e}", p.display())))?;
            serde_json::from_str(&text).map_err(|e| {
                CmdError::Config(format!("{}:{}: {}", p.display(), e.line(), e))
            })
        }
    }
}

/// Parse a comma-separated numeric list.
pub fn parse_list(s: &str) -> Result<Vec<f64>, CmdError> {
    s.split(',')
        .map(|v| {
            v.trim()
                .parse::<f64>()
                .map_err(|e| CmdError::Config(format!("bad number {v:?}: {e}")))
        })
        .collect()
}

/// Calibration of the nominal engine, cached under the output directory so
/// repeated closed-loop commands reuse the same sweep.
pub fn get_calibration(
    ctx: &Context,
    geometry: &sfrj_core::engine::EngineGeometry,
    solver: sfrj_core::engine::SolverConfig,
    gas: sfrj_core::gas::GasModel,
) -> Result<sfrj_core::harness::Calibration, CmdError> {
    let path = ctx.out.join("calibration.json");
    if let Ok(text) = std::fs::read_to_string(&path) {
        if let Ok(cal) = serde_json::from_str(&text) {
            return Ok(cal);
        }
    }
    let bc = sfrj_core::engine::BoundaryCondition::nominal(&gas);
    let sweep = sfrj_core::envelope::heat_flux_sweep(
        geometry,
        bc,
        solver,
        gas,
        &sfrj_core::envelope::default_flux_grid(),
        sfrj_core::envelope::SweepPolicy::default(),
    );
    let cal = sfrj_core::harness::Calibration::from_sweep(&sweep)
        .ok_or_else(|| CmdError::Solver("calibration sweep found no started points".into()))?;
    sfrj_core::io::write_json(&path, &cal).map_err(|e| CmdError::Solver(e.to_string()))?;
    Ok(cal)
}
