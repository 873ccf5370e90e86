//! Post-processing of steady fields: isentropic station analysis and the
//! grid-convergence study.

use super::geometry::EngineGeometry;
use super::grid::Grid;
use super::solver::{BoundaryCondition, EngineSolver, SolverConfig, SolverError};
use crate::gas::{isentropic_ratios, Branch, FlowState, GasModel, IsentropicRatios};
use serde::{Deserialize, Serialize};

/// Stations reported by the isentropic analysis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Station {
    InletMid,
    CombustorMid,
    CombustorEnd,
    Throat,
}

/// Flow-function snapshot of one station.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StationAnalysis {
    pub station: Station,
    pub x: f64,
    pub mach: f64,
    pub branch: Branch,
    pub ratios: IsentropicRatios,
}

/// Evaluate (p/pt, T/Tt, A/A*) from the local Mach number at the inlet-channel
/// midpoint, the combustor midpoint and end, and the nozzle throat. Plotting
/// these per heat-flux level reproduces the three-panel state-evolution view
/// (no heat / before unstart / after unstart).
pub fn isentropic_state_analysis(
    field: &[FlowState],
    grid: &Grid,
    geometry: &EngineGeometry,
    gas: &GasModel,
) -> Vec<StationAnalysis> {
    let (heat_lo, heat_hi) = geometry.heated_span;
    let positions = [
        (Station::InletMid, 0.5 * geometry.dump_plane),
        (Station::CombustorMid, 0.5 * (heat_lo + heat_hi)),
        (Station::CombustorEnd, heat_hi - 2.0 * grid.dx),
        (Station::Throat, geometry.throat_position),
    ];
    positions
        .iter()
        .map(|&(station, x)| {
            let cell = grid.cell_at(x);
            let mach = field[cell].mach.max(1e-9);
            let ratios = isentropic_ratios(mach, gas).expect("mach clamped positive");
            StationAnalysis {
                station,
                x: grid.x_centers[cell],
                mach,
                branch: if mach < 1.0 {
                    Branch::Subsonic
                } else {
                    Branch::Supersonic
                },
                ratios,
            }
        })
        .collect()
}

/// One row of the grid-convergence table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceRow {
    pub n_cells: usize,
    /// (heat flux, thrust, unstarted) per sweep point.
    pub sweep: Vec<(f64, f64, bool)>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceStudy {
    pub rows: Vec<ConvergenceRow>,
    /// Max relative thrust change between successive refinements, evaluated
    /// over the pre-unstart points of the coarser grid.
    pub successive_change: Vec<f64>,
    /// Coarsest cell count whose change to the next refinement is below 1%.
    pub converged_cells: Option<usize>,
}

/// Refinement study: solve the heat-flux sweep at each cell count (ascending
/// warm-start continuation per count) and report Richardson-style successive
/// thrust changes.
pub fn grid_convergence_study(
    cell_counts: &[usize],
    fluxes: &[f64],
    geometry: &EngineGeometry,
    bc: BoundaryCondition,
    base_config: SolverConfig,
    gas: GasModel,
) -> Result<ConvergenceStudy, SolverError> {
    assert!(cell_counts.len() >= 3, "need at least three cell counts");
    let mut rows = Vec::new();
    for &n in cell_counts {
        let config = SolverConfig {
            n_cells: n,
            ..base_config
        };
        let mut solver = EngineSolver::new(geometry.clone(), bc, config, gas);
        let mut sweep = Vec::new();
        for &q in fluxes {
            let result = solver.run_to_steady(q)?;
            sweep.push((q, result.thrust, result.unstarted()));
        }
        rows.push(ConvergenceRow { n_cells: n, sweep });
    }

    let mut successive_change = Vec::new();
    for pair in rows.windows(2) {
        // Normalize by the sweep's thrust scale; per-point normalization
        // blows up near the zero-thrust crossing.
        let scale = pair[0]
            .sweep
            .iter()
            .filter(|p| !p.2)
            .map(|p| p.1.abs())
            .fold(1.0_f64, f64::max);
        let mut max_change = 0.0_f64;
        for (coarse, fine) in pair[0].sweep.iter().zip(&pair[1].sweep) {
            // Compare only where the coarser run stayed started.
            if coarse.2 || fine.2 {
                continue;
            }
            max_change = max_change.max((fine.1 - coarse.1).abs() / scale);
        }
        successive_change.push(max_change);
    }
    let converged_cells = successive_change
        .iter()
        .position(|&c| c < 0.01)
        .map(|i| rows[i].n_cells);
    Ok(ConvergenceStudy {
        rows,
        successive_change,
        converged_cells,
    })
}
