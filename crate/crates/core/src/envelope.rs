//! Open-loop characterization: heat-flux sweeps, the (altitude, velocity,
//! flux) envelope table, and feasibility queries against it.

use crate::atmosphere::isa;
use crate::engine::{
    BoundaryCondition, EngineGeometry, EngineSolver, InletCondition, OutletMode, SolverConfig,
    SolverError,
};
use crate::gas::GasModel;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum EnvelopeError {
    #[error("query ({0}, {1}) outside the table axes; no extrapolation")]
    OutOfRange(f64, f64),
    #[error("table has no started point at this operating condition")]
    NoFeasibleThrust,
    #[error(transparent)]
    Solver(#[from] SolverError),
}

/// One solved operating point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepPoint {
    pub flux: f64,
    pub thrust: f64,
    /// Trailing-window mean; equals `thrust` for converged points.
    pub thrust_mean: f64,
    pub unstarted: bool,
    pub converged: bool,
    pub inlet_pressure_ratio: f64,
    pub min_inlet_mach: f64,
}

/// Result of an ascending heat-flux sweep at fixed boundary conditions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HeatFluxSweep {
    pub points: Vec<SweepPoint>,
    /// Index of the first unstarted point, if any.
    pub first_unstart: Option<usize>,
}

impl HeatFluxSweep {
    /// Points before the first unstart.
    pub fn started_prefix(&self) -> &[SweepPoint] {
        match self.first_unstart {
            Some(i) => &self.points[..i],
            None => &self.points,
        }
    }

    /// Largest thrust over the started prefix.
    pub fn max_thrust(&self) -> Option<f64> {
        self.started_prefix()
            .iter()
            .filter(|p| p.converged)
            .map(|p| p.thrust)
            .fold(None, |acc, t| Some(acc.map_or(t, |a: f64| a.max(t))))
    }
}

/// Sweep policy: how far past the given flux list to look for unstart and
/// how finely to bracket it once found.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepPolicy {
    /// Extend past the last flux in steps of `extend_step` until unstart.
    pub extend_to_unstart: bool,
    pub extend_step: f64,
    pub extend_cap: f64,
    /// After a first unstart between two sweep points, refine the bracket
    /// with this step (0 disables refinement).
    pub refine_step: f64,
}

impl Default for SweepPolicy {
    fn default() -> Self {
        Self {
            extend_to_unstart: true,
            extend_step: 2.0e6,
            extend_cap: 100.0e6,
            refine_step: 0.5e6,
        }
    }
}

/// Default flux grid: {2, 4, ..., 16} x 10^6 W/m^2.
pub fn default_flux_grid() -> Vec<f64> {
    (1..=8).map(|i| 2.0e6 * i as f64).collect()
}

/// Ascending warm-start continuation sweep over `fluxes` (must be sorted).
/// Each steady state seeds the next solve; the first point starts cold.
/// Solver failures at a point are recorded and the sweep continues cold at
/// the next point.
pub fn heat_flux_sweep(
    geometry: &EngineGeometry,
    bc: BoundaryCondition,
    config: SolverConfig,
    gas: GasModel,
    fluxes: &[f64],
    policy: SweepPolicy,
) -> HeatFluxSweep {
    assert!(
        fluxes.windows(2).all(|w| w[0] < w[1]),
        "flux list must be strictly increasing"
    );
    let mut solver = EngineSolver::new(geometry.clone(), bc, config, gas);
    let mut points = Vec::new();
    let mut last_started_field: Option<Vec<crate::engine::Conserved>> = None;

    let run_point = |solver: &mut EngineSolver, flux: f64| -> SweepPoint {
        match solver.run_to_steady(flux) {
            Ok(r) => SweepPoint {
                flux,
                thrust: r.thrust,
                thrust_mean: r.thrust_mean,
                unstarted: r.unstarted(),
                converged: r.converged,
                inlet_pressure_ratio: r.unstart.inlet_pressure_ratio,
                min_inlet_mach: r.unstart.min_inlet_mach,
            },
            Err(_) => {
                solver.reset();
                SweepPoint {
                    flux,
                    thrust: f64::NAN,
                    thrust_mean: f64::NAN,
                    unstarted: true,
                    converged: false,
                    inlet_pressure_ratio: f64::NAN,
                    min_inlet_mach: f64::NAN,
                }
            }
        }
    };

    let mut sweep_fluxes: Vec<f64> = fluxes.to_vec();
    let mut idx = 0;
    let mut first_unstart = None;
    while idx < sweep_fluxes.len() {
        let q = sweep_fluxes[idx];
        let point = run_point(&mut solver, q);
        if !point.unstarted && point.converged {
            last_started_field = Some(solver.conserved().to_vec());
        }
        let unstarted = point.unstarted;
        points.push(point);
        if unstarted && first_unstart.is_none() {
            first_unstart = Some(idx);
            break;
        }
        idx += 1;
        if idx == sweep_fluxes.len()
            && policy.extend_to_unstart
            && first_unstart.is_none()
            && q + policy.extend_step <= policy.extend_cap
        {
            sweep_fluxes.push(q + policy.extend_step);
        }
    }

    // Refinement pass: bracket the onset between the last started and the
    // first unstarted flux, continuing from the last started field.
    if let (Some(i), true) = (first_unstart, policy.refine_step > 0.0) {
        if i > 0 {
            let lo = points[i - 1].flux;
            let hi = points[i].flux;
            let mut refined = Vec::new();
            if let Some(field) = &last_started_field {
                solver.set_conserved(field);
                let mut q = lo + policy.refine_step;
                while q < hi - 0.5 * policy.refine_step {
                    let point = run_point(&mut solver, q);
                    let stop = point.unstarted;
                    refined.push(point);
                    if stop {
                        break;
                    }
                    q += policy.refine_step;
                }
            }
            let tail = points.split_off(i);
            points.extend(refined);
            points.extend(tail);
            first_unstart = points.iter().position(|p| p.unstarted);
        }
    }

    HeatFluxSweep {
        points,
        first_unstart,
    }
}

/// Axes and values of the operating-envelope lookup table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnvelopeTable {
    pub altitudes: Vec<f64>,
    pub velocities: Vec<f64>,
    pub fluxes: Vec<f64>,
    /// Sweeps indexed by [altitude][velocity].
    pub sweeps: Vec<Vec<HeatFluxSweep>>,
    pub metadata: EnvelopeMetadata,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnvelopeMetadata {
    pub geometry_fingerprint: String,
    pub n_cells: usize,
    pub mass_imbalance_tol: f64,
    /// Axis pairing note: each (altitude, velocity) pair maps to an inlet
    /// state through the standard atmosphere.
    pub axis_note: String,
}

impl EnvelopeTable {
    /// Max feasible (pre-unstart, converged) thrust at a grid node.
    pub fn max_thrust_at(&self, ia: usize, iv: usize) -> Option<f64> {
        self.sweeps[ia][iv].max_thrust()
    }

    /// Bilinear interpolation of the max feasible thrust over the
    /// (altitude, velocity) axes. Errors outside the grid; no extrapolation.
    pub fn max_thrust(&self, altitude: f64, velocity: f64) -> Result<f64, EnvelopeError> {
        let (ia, ta) = bracket(&self.altitudes, altitude)
            .ok_or(EnvelopeError::OutOfRange(altitude, velocity))?;
        let (iv, tv) = bracket(&self.velocities, velocity)
            .ok_or(EnvelopeError::OutOfRange(altitude, velocity))?;
        let mut corner = [[0.0; 2]; 2];
        for (da, row) in corner.iter_mut().enumerate() {
            for (dv, value) in row.iter_mut().enumerate() {
                *value = self
                    .max_thrust_at(ia + da, iv + dv)
                    .ok_or(EnvelopeError::NoFeasibleThrust)?;
            }
        }
        Ok(corner[0][0] * (1.0 - ta) * (1.0 - tv)
            + corner[1][0] * ta * (1.0 - tv)
            + corner[0][1] * (1.0 - ta) * tv
            + corner[1][1] * ta * tv)
    }

    /// Feasibility of a thrust command at an operating point.
    pub fn query_feasible(
        &self,
        altitude: f64,
        velocity: f64,
        thrust: f64,
    ) -> Result<Feasibility, EnvelopeError> {
        let max_thrust = self.max_thrust(altitude, velocity)?;
        Ok(Feasibility {
            feasible: thrust <= max_thrust,
            max_thrust,
        })
    }

    /// Interpolated thrust at (altitude, velocity, flux): the surrogate
    /// engine model. Trilinear over the axes using trailing-mean thrusts.
    pub fn thrust(
        &self,
        altitude: f64,
        velocity: f64,
        flux: f64,
    ) -> Result<f64, EnvelopeError> {
        let (ia, ta) = bracket(&self.altitudes, altitude)
            .ok_or(EnvelopeError::OutOfRange(altitude, velocity))?;
        let (iv, tv) = bracket(&self.velocities, velocity)
            .ok_or(EnvelopeError::OutOfRange(altitude, velocity))?;
        let mut corner = [[0.0; 2]; 2];
        for (da, row) in corner.iter_mut().enumerate() {
            for (dv, value) in row.iter_mut().enumerate() {
                *value = sweep_thrust_at(&self.sweeps[ia + da][iv + dv], flux)
                    .ok_or(EnvelopeError::NoFeasibleThrust)?;
            }
        }
        Ok(corner[0][0] * (1.0 - ta) * (1.0 - tv)
            + corner[1][0] * ta * (1.0 - tv)
            + corner[0][1] * (1.0 - ta) * tv
            + corner[1][1] * ta * tv)
    }

    /// Flatten to CSV rows: altitude, velocity, flux, thrust, thrust_mean,
    /// unstarted, converged.
    pub fn to_csv(&self) -> String {
        let mut out =
            String::from("altitude,velocity,flux,thrust,thrust_mean,unstarted,converged\n");
        for (ia, &alt) in self.altitudes.iter().enumerate() {
            for (iv, &vel) in self.velocities.iter().enumerate() {
                for p in &self.sweeps[ia][iv].points {
                    out.push_str(&format!(
                        "{},{},{},{},{},{},{}\n",
                        alt, vel, p.flux, p.thrust, p.thrust_mean, p.unstarted, p.converged
                    ));
                }
            }
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Feasibility {
    pub feasible: bool,
    pub max_thrust: f64,
}

/// Linear thrust interpolation along a sweep's flux axis (started points
/// only).
fn sweep_thrust_at(sweep: &HeatFluxSweep, flux: f64) -> Option<f64> {
    let pts = sweep.started_prefix();
    if pts.is_empty() {
        return None;
    }
    let fluxes: Vec<f64> = pts.iter().map(|p| p.flux).collect();
    let (i, t) = bracket(&fluxes, flux.clamp(fluxes[0], *fluxes.last().unwrap()))?;
    Some(pts[i].thrust_mean * (1.0 - t) + pts[i + 1].thrust_mean * t)
}

/// Index and fraction of `x` within sorted `axis` (None outside or axis too
/// short to interpolate).
fn bracket(axis: &[f64], x: f64) -> Option<(usize, f64)> {
    if axis.len() < 2 || x < axis[0] || x > *axis.last().unwrap() {
        return None;
    }
    let i = axis
        .windows(2)
        .position(|w| x >= w[0] && x <= w[1])
        .unwrap_or(axis.len() - 2);
    Some((i, (x - axis[i]) / (axis[i + 1] - axis[i])))
}

/// Inlet condition for a flight point: static (p, T) from the standard
/// atmosphere at `altitude`, prescribed `velocity`.
pub fn flight_inlet(altitude: f64, velocity: f64) -> Result<InletCondition, crate::atmosphere::AtmoError> {
    let atmo = isa(altitude)?;
    Ok(InletCondition {
        velocity,
        pressure: atmo.p,
        temperature: atmo.t,
    })
}

/// Build the full factorial envelope table. Grid points are independent and
/// run in parallel; each (altitude, velocity) cell is one ascending sweep.
pub fn build_envelope(
    geometry: &EngineGeometry,
    config: SolverConfig,
    gas: GasModel,
    altitudes: &[f64],
    velocities: &[f64],
    fluxes: &[f64],
    policy: SweepPolicy,
) -> Result<EnvelopeTable, EnvelopeError> {
    assert!(!altitudes.is_empty() && !velocities.is_empty() && !fluxes.is_empty());
    let cells: Vec<(usize, usize)> = (0..altitudes.len())
        .flat_map(|ia| (0..velocities.len()).map(move |iv| (ia, iv)))
        .collect();
    let mut solved: Vec<((usize, usize), HeatFluxSweep)> = cells
        .par_iter()
        .map(|&(ia, iv)| {
            let inlet = flight_inlet(altitudes[ia], velocities[iv])
                .expect("altitude grid must be inside the troposphere");
            let bc = BoundaryCondition::new(
                inlet,
                OutletMode::Auto {
                    back_pressure: inlet.pressure,
                },
                &gas,
            );
            let sweep = heat_flux_sweep(geometry, bc, config, gas, fluxes, policy);
            ((ia, iv), sweep)
        })
        .collect();
    solved.sort_by_key(|(key, _)| *key);

    let mut sweeps: Vec<Vec<HeatFluxSweep>> = Vec::with_capacity(altitudes.len());
    let mut iter = solved.into_iter();
    for _ in 0..altitudes.len() {
        let mut row = Vec::with_capacity(velocities.len());
        for _ in 0..velocities.len() {
            row.push(iter.next().expect("cell count matches").1);
        }
        sweeps.push(row);
    }

    let geometry_fingerprint =
        crate::io::fingerprint(serde_json::to_string(geometry).unwrap().as_bytes());
    Ok(EnvelopeTable {
        altitudes: altitudes.to_vec(),
        velocities: velocities.to_vec(),
        fluxes: fluxes.to_vec(),
        sweeps,
        metadata: EnvelopeMetadata {
            geometry_fingerprint,
            n_cells: config.n_cells,
            mass_imbalance_tol: config.mass_imbalance_tol,
            axis_note: "subplot pairing: altitude vs velocity per flux level, inlet states via ISA"
                .into(),
        },
    })
}

/// Default envelope axes: the five altitudes of the envelope view, three
/// velocities, and the default flux grid.
pub fn default_axes() -> (Vec<f64>, Vec<f64>, Vec<f64>) {
    (
        vec![5_000.0, 6_250.0, 7_500.0, 8_750.0, 10_000.0],
        vec![800.0, 900.0, 1_000.0],
        default_flux_grid(),
    )
}
