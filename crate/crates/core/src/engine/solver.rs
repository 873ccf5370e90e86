//! Explicit finite-volume driver for the quasi-1D engine flow.
//!
//! The solver owns its conserved field, so one instance maps to one engine;
//! sweeps and Monte-Carlo studies run independent instances in parallel.
//! Steady states are reached by local pseudo-time stepping; the closed-loop
//! harness instead advances a fixed iteration budget per control step and
//! reads the quasi-steady thrust.

use super::flux::{minmod, rusanov, signal_speed};
use super::geometry::EngineGeometry;
use super::grid::Grid;
use super::state::{decode, encode, primitive_to_state, Conserved, Primitive};
use crate::gas::{FlowState, GasModel};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum SolverError {
    #[error("step rejected: unphysical state in cell {cell} at iteration {iteration}")]
    StepRejected { cell: usize, iteration: u64 },
    #[error("solver diverged at iteration {iteration}: rms mass residual {rms_mass:.3e} exceeds {bound:.3e}")]
    Diverged {
        iteration: u64,
        rms_mass: f64,
        bound: f64,
        history: Vec<ResidualSample>,
    },
    #[error("CFL violation: global dt {dt:.3e} s exceeds stable dt {stable:.3e} s")]
    CflViolation { dt: f64, stable: f64 },
}

/// Prescribed inlet: velocity, static pressure, static temperature.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InletCondition {
    pub velocity: f64,
    pub pressure: f64,
    pub temperature: f64,
}

impl InletCondition {
    /// Benchmark condition: 695 m/s, 100 kPa, 300 K (inlet Mach just above 2).
    pub fn nominal() -> Self {
        Self {
            velocity: 695.0,
            pressure: 100_000.0,
            temperature: 300.0,
        }
    }

    pub fn density(&self, gas: &GasModel) -> f64 {
        self.pressure / (gas.r * self.temperature)
    }

    pub fn mach(&self, gas: &GasModel) -> f64 {
        self.velocity / gas.sound_speed(self.temperature)
    }

    pub fn state(&self, gas: &GasModel) -> FlowState {
        FlowState::from_primitive(self.density(gas), self.velocity, self.pressure, gas)
            .expect("inlet condition must be physical")
    }
}

/// Outlet treatment. `Auto` extrapolates while the exit is supersonic and
/// falls back to the prescribed back pressure when it is not; extrapolation
/// alone is ill-posed for subsonic exits.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum OutletMode {
    Extrapolation,
    BackPressure(f64),
    Auto { back_pressure: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundaryCondition {
    pub inlet: InletCondition,
    pub outlet: OutletMode,
    /// Inlet Mach number at construction, recorded for diagnostics.
    pub inlet_mach: f64,
    /// Feed total temperature, K.
    pub feed_total_temperature: f64,
    /// Total pressure available to a blocked duct: the feed pt through a
    /// normal shock at the design inlet Mach (identity for subsonic feeds).
    pub feed_total_pressure: f64,
    /// Feed state behind a normal shock at the design inlet Mach
    /// (rho, u, p); only meaningful for supersonic feeds.
    pub post_shock: [f64; 3],
}

impl BoundaryCondition {
    pub fn new(inlet: InletCondition, outlet: OutletMode, gas: &GasModel) -> Self {
        assert!(
            inlet.velocity > 0.0 && inlet.pressure > 0.0 && inlet.temperature > 0.0,
            "inlet values must be positive"
        );
        let inlet_mach = inlet.mach(gas);
        let state = inlet.state(gas);
        let pt = state.total_pressure(gas);
        let (recovery, post_shock) = if inlet_mach > 1.0 {
            let jump =
                crate::gas::normal_shock_jump(inlet_mach, gas).expect("inlet_mach > 1 checked");
            let recovery = crate::gas::normal_shock_total_pressure_ratio(inlet_mach, gas)
                .expect("inlet_mach > 1 checked");
            (
                recovery,
                [
                    state.rho * jump.density_ratio,
                    state.u / jump.density_ratio,
                    state.p * jump.pressure_ratio,
                ],
            )
        } else {
            (1.0, [state.rho, state.u, state.p])
        };
        Self {
            inlet,
            outlet,
            inlet_mach,
            feed_total_temperature: state.total_temperature(gas),
            feed_total_pressure: recovery * pt,
            post_shock,
        }
    }

    /// Nominal benchmark boundary conditions with the auto outlet fallback.
    pub fn nominal(gas: &GasModel) -> Self {
        let inlet = InletCondition::nominal();
        Self::new(
            inlet,
            OutletMode::Auto {
                back_pressure: inlet.pressure,
            },
            gas,
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    pub n_cells: usize,
    pub cfl: f64,
    pub max_iterations: u64,
    /// Required drop factor of the RMS mass/energy residuals.
    pub residual_drop: f64,
    pub mass_imbalance_tol: f64,
    /// Second-order MUSCL reconstruction with minmod limiting.
    pub muscl: bool,
    /// Dump-plane smearing width in cell widths.
    pub smear_cells: f64,
    /// Residual history is recorded every this many iterations.
    pub residual_stride: u64,
    /// Residual growth beyond this factor over the reference aborts the run.
    pub divergence_factor: f64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            n_cells: 500,
            cfl: 0.5,
            max_iterations: 200_000,
            residual_drop: 1e6,
            mass_imbalance_tol: 1e-6,
            // First order by default: the limiter flickers on the standing
            // dump shock and stalls steady convergence. MUSCL is used where
            // the flow is smooth and second-order accuracy matters.
            muscl: false,
            smear_cells: 8.0,
            residual_stride: 100,
            divergence_factor: 1e4,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ResidualSample {
    pub iteration: u64,
    pub rms_mass: f64,
    pub rms_energy: f64,
    pub mass_imbalance: f64,
}

/// Unstart verdict and the quantities it was judged from.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UnstartReport {
    pub unstarted: bool,
    pub min_inlet_mach: f64,
    pub max_combustor_mach: f64,
    /// Static pressure in the first interior cell.
    pub inlet_plane_pressure: f64,
    /// Inlet-plane pressure over the prescribed inlet pressure.
    pub inlet_pressure_ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SteadyResult {
    pub field: Vec<FlowState>,
    pub thrust: f64,
    /// Thrust averaged over the trailing iteration window. Identical to
    /// `thrust` for converged runs; for runs that end in a limit cycle
    /// (unstart buzz) this is the meaningful operating value.
    pub thrust_mean: f64,
    pub converged: bool,
    pub unstart: UnstartReport,
    pub iterations: u64,
    pub mass_imbalance: f64,
    pub residual_history: Vec<ResidualSample>,
    /// Whether the back-pressure outlet fallback engaged at any point.
    pub outlet_switched: bool,
    pub heated_wall_area: f64,
    /// Final conserved field, reusable as a warm start.
    pub final_conserved: Vec<Conserved>,
}

impl SteadyResult {
    pub fn unstarted(&self) -> bool {
        self.unstart.unstarted
    }
}

/// Thrust from momentum conservation over the engine control volume:
/// tau = mdot (u_out - u_in) + (p_out - p_in) A_exit, with mdot the outlet
/// mass flow.
pub fn compute_thrust(inlet: &FlowState, outlet: &FlowState, exit_area: f64) -> f64 {
    let mdot = outlet.rho * outlet.u * exit_area;
    mdot * (outlet.u - inlet.u) + (outlet.p - inlet.p) * exit_area
}

/// One engine instance: geometry, discretization, boundary conditions and the
/// evolving conserved field.
#[derive(Debug, Clone)]
pub struct EngineSolver {
    gas: GasModel,
    geometry: EngineGeometry,
    grid: Grid,
    bc: BoundaryCondition,
    config: SolverConfig,
    u: Vec<Conserved>,
    prim_ext: Vec<Primitive>,
    slopes: Vec<Primitive>,
    face_flux: Vec<[f64; 3]>,
    rhs: Vec<[f64; 3]>,
    iterations: u64,
    outlet_switched: bool,
}

impl EngineSolver {
    pub fn new(
        geometry: EngineGeometry,
        bc: BoundaryCondition,
        config: SolverConfig,
        gas: GasModel,
    ) -> Self {
        let grid = Grid::new(&geometry, config.n_cells, config.smear_cells);
        let n = grid.n_cells;
        let mut solver = Self {
            gas,
            geometry,
            grid,
            bc,
            config,
            u: vec![[0.0; 3]; n],
            prim_ext: vec![[0.0; 3]; n + 2],
            slopes: vec![[0.0; 3]; n + 2],
            face_flux: vec![[0.0; 3]; n + 1],
            rhs: vec![[0.0; 3]; n],
            iterations: 0,
            outlet_switched: false,
        };
        solver.reset();
        solver
    }

    /// Cold start: the prescribed inlet state fills the whole duct.
    pub fn reset(&mut self) {
        let rho = self.bc.inlet.density(&self.gas);
        let (u, p) = (self.bc.inlet.velocity, self.bc.inlet.pressure);
        for i in 0..self.grid.n_cells {
            self.u[i] = encode(rho, u, p, self.grid.area_centers[i], &self.gas);
        }
        self.iterations = 0;
        self.outlet_switched = false;
    }

    /// Warm start from a previously converged conserved field.
    pub fn set_conserved(&mut self, field: &[Conserved]) {
        assert_eq!(field.len(), self.grid.n_cells, "warm start requires the same grid");
        self.u.copy_from_slice(field);
    }

    pub fn conserved(&self) -> &[Conserved] {
        &self.u
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn geometry(&self) -> &EngineGeometry {
        &self.geometry
    }

    pub fn gas(&self) -> &GasModel {
        &self.gas
    }

    pub fn boundary_condition(&self) -> &BoundaryCondition {
        &self.bc
    }

    pub fn set_boundary_condition(&mut self, bc: BoundaryCondition) {
        self.bc = bc;
    }

    pub fn iterations(&self) -> u64 {
        self.iterations
    }

    /// Decode the current field into primitive flow states.
    pub fn field(&self) -> Vec<FlowState> {
        (0..self.grid.n_cells)
            .map(|i| {
                let w = decode(&self.u[i], self.grid.area_centers[i], &self.gas)
                    .expect("stored field must remain physical");
                primitive_to_state(&w, &self.gas)
            })
            .collect()
    }

    /// Thrust of the current field (inlet plane = first cell, outlet plane =
    /// last cell, pressure difference on the exit face area). The inlet-plane
    /// pressure rise after unstart is what collapses the thrust.
    pub fn thrust(&self) -> f64 {
        let n = self.grid.n_cells;
        let first = decode(&self.u[0], self.grid.area_centers[0], &self.gas)
            .expect("field must be physical");
        let last = decode(&self.u[n - 1], self.grid.area_centers[n - 1], &self.gas)
            .expect("field must be physical");
        compute_thrust(
            &primitive_to_state(&first, &self.gas),
            &primitive_to_state(&last, &self.gas),
            self.grid.area_faces[n],
        )
    }

    /// Total energy integral of the field, J (sum of rho E A dx).
    pub fn total_energy(&self) -> f64 {
        self.u.iter().map(|c| c[2] * self.grid.dx).sum()
    }

    /// Total mass integral of the field, kg.
    pub fn total_mass(&self) -> f64 {
        self.u.iter().map(|c| c[0] * self.grid.dx).sum()
    }

    /// Mass fluxes through the inlet and outlet faces of the last RHS
    /// evaluation, kg/s.
    pub fn boundary_mass_fluxes(&self) -> (f64, f64) {
        let n = self.grid.n_cells;
        (self.face_flux[0][0], self.face_flux[n][0])
    }

    fn mass_imbalance(&self) -> f64 {
        let (m_in, m_out) = self.boundary_mass_fluxes();
        (m_out - m_in).abs() / m_in.abs().max(1e-300)
    }

    /// Fill the extended primitive array (ghosts included) from the current
    /// conserved field. Fails on an unphysical cell.
    fn build_primitives(&mut self) -> Result<(), SolverError> {
        let n = self.grid.n_cells;
        for i in 0..n {
            match decode(&self.u[i], self.grid.area_centers[i], &self.gas) {
                Some(w) => self.prim_ext[i + 1] = w,
                None => {
                    return Err(SolverError::StepRejected {
                        cell: i,
                        iteration: self.iterations,
                    })
                }
            }
        }
        // Inlet ghost. A supersonic design feed is fully prescribed while the
        // first cell remains supersonic. When the duct blocks (first cell
        // subsonic), the feed behaves as a reservoir at the post-shock
        // recovery totals, capped at the design capture mass flow: this is
        // the 1D model of an expelled inlet shock, and it lets the duct
        // re-swallow the shock whenever it can pass the full feed again.
        let design = [
            self.bc.inlet.density(&self.gas),
            self.bc.inlet.velocity,
            self.bc.inlet.pressure,
        ];
        self.prim_ext[0] = if self.bc.inlet_mach > 1.0 {
            let first = self.prim_ext[1];
            let first_mach = first[1] / (self.gas.gamma * first[2] / first[0]).sqrt();
            // Started flow holds the design state in the first cell; treat a
            // subsonic or pressurized (>2%) first cell as a blocked duct.
            if first_mach >= 1.0 && first[2] <= 1.02 * design[2] {
                design
            } else if first[2] <= self.bc.post_shock[2] {
                // Blocked duct at or below post-shock pressure: feed through
                // the expelled normal shock. This ghost carries the same
                // mass, momentum and energy fluxes as the design feed, so
                // the duct re-swallows whenever it can pass the full flow.
                self.bc.post_shock
            } else {
                // Over-pressured duct: spillage regime. Subsonic inflow from
                // the post-shock reservoir at the interior pressure.
                let g = self.gas.gamma;
                let pt = self.bc.feed_total_pressure;
                let tt = self.bc.feed_total_temperature;
                let p_g = first[2].min(0.9999 * pt);
                let t_g = tt * (p_g / pt).powf((g - 1.0) / g);
                let u_g = (2.0 * self.gas.cp * (tt - t_g).max(0.0)).sqrt();
                let rho_g = p_g / (self.gas.r * t_g);
                [rho_g, u_g, p_g]
            }
        } else {
            design
        };
        // Outlet ghost.
        let last = self.prim_ext[n];
        let exit_mach = last[1] / (self.gas.gamma * last[2] / last[0]).sqrt();
        let ghost = match self.bc.outlet {
            OutletMode::Extrapolation => last,
            OutletMode::BackPressure(pb) => {
                self.outlet_switched = true;
                [last[0], last[1], pb]
            }
            OutletMode::Auto { back_pressure } => {
                if exit_mach >= 1.0 {
                    last
                } else {
                    self.outlet_switched = true;
                    [last[0], last[1], back_pressure]
                }
            }
        };
        self.prim_ext[n + 1] = ghost;
        Ok(())
    }

    /// Compute face fluxes and the per-cell RHS for the wall heat flux
    /// `q_wall` (W/m^2).
    fn compute_rhs(&mut self, q_wall: f64) -> Result<(), SolverError> {
        self.build_primitives()?;
        let n = self.grid.n_cells;

        if self.config.muscl {
            self.slopes[0] = [0.0; 3];
            self.slopes[n + 1] = [0.0; 3];
            for j in 1..=n {
                for k in 0..3 {
                    self.slopes[j][k] = minmod(
                        self.prim_ext[j][k] - self.prim_ext[j - 1][k],
                        self.prim_ext[j + 1][k] - self.prim_ext[j][k],
                    );
                }
            }
        }

        for f in 0..=n {
            let (mut wl, mut wr) = (self.prim_ext[f], self.prim_ext[f + 1]);
            if self.config.muscl {
                for k in 0..3 {
                    wl[k] += 0.5 * self.slopes[f][k];
                    wr[k] -= 0.5 * self.slopes[f + 1][k];
                }
                // Reconstruction must not produce vacuum; fall back to the
                // first-order states at this face if it does.
                if wl[0] <= 0.0 || wl[2] <= 0.0 || wr[0] <= 0.0 || wr[2] <= 0.0 {
                    wl = self.prim_ext[f];
                    wr = self.prim_ext[f + 1];
                }
            }
            let flux = rusanov(&wl, &wr, &self.gas);
            let a = self.grid.area_faces[f];
            self.face_flux[f] = [flux[0] * a, flux[1] * a, flux[2] * a];
        }

        let inv_dx = 1.0 / self.grid.dx;
        for i in 0..n {
            let fl = self.face_flux[i];
            let fr = self.face_flux[i + 1];
            let p = self.prim_ext[i + 1][2];
            let da = self.grid.area_faces[i + 1] - self.grid.area_faces[i];
            self.rhs[i] = [
                -(fr[0] - fl[0]) * inv_dx,
                -(fr[1] - fl[1]) * inv_dx + p * da * inv_dx,
                -(fr[2] - fl[2]) * inv_dx
                    + q_wall * self.grid.perimeter[i] * self.grid.heated_fraction[i],
            ];
        }
        Ok(())
    }

    /// RMS of the mass and energy residual components.
    fn residual_norms(&self) -> (f64, f64) {
        let n = self.grid.n_cells as f64;
        let mut sm = 0.0;
        let mut se = 0.0;
        for r in &self.rhs {
            sm += r[0] * r[0];
            se += r[2] * r[2];
        }
        ((sm / n).sqrt(), (se / n).sqrt())
    }

    /// One explicit step with a single global time step `dt` (s). This is the
    /// transient-accurate update; the conservative part telescopes to machine
    /// precision.
    pub fn advance(&mut self, q_wall: f64, dt: f64) -> Result<(), SolverError> {
        self.compute_rhs(q_wall)?;
        let stable = (0..self.grid.n_cells)
            .map(|i| self.grid.dx / signal_speed(&self.prim_ext[i + 1], &self.gas))
            .fold(f64::INFINITY, f64::min);
        if dt > stable {
            return Err(SolverError::CflViolation { dt, stable });
        }
        for i in 0..self.grid.n_cells {
            for k in 0..3 {
                self.u[i][k] += dt * self.rhs[i][k];
            }
        }
        self.iterations += 1;
        self.validate()
    }

    /// Largest globally stable time step at the current field and CFL.
    pub fn stable_dt(&mut self, q_wall: f64) -> Result<f64, SolverError> {
        self.compute_rhs(q_wall)?;
        Ok((0..self.grid.n_cells)
            .map(|i| {
                self.config.cfl * self.grid.dx / signal_speed(&self.prim_ext[i + 1], &self.gas)
            })
            .fold(f64::INFINITY, f64::min))
    }

    fn validate(&mut self) -> Result<(), SolverError> {
        for i in 0..self.grid.n_cells {
            if decode(&self.u[i], self.grid.area_centers[i], &self.gas).is_none() {
                return Err(SolverError::StepRejected {
                    cell: i,
                    iteration: self.iterations,
                });
            }
        }
        Ok(())
    }

    /// One local-time-step pseudo-time iteration toward steady state.
    /// Returns (rms_mass, rms_energy).
    fn pseudo_step(&mut self, q_wall: f64) -> Result<(f64, f64), SolverError> {
        self.compute_rhs(q_wall)?;
        let norms = self.residual_norms();
        for i in 0..self.grid.n_cells {
            let dt = self.config.cfl * self.grid.dx
                / signal_speed(&self.prim_ext[i + 1], &self.gas);
            for k in 0..3 {
                self.u[i][k] += dt * self.rhs[i][k];
            }
        }
        self.iterations += 1;
        self.validate()?;
        Ok(norms)
    }

    /// Advance `n` pseudo-time iterations at the given wall heat flux. The
    /// closed-loop harness couples through this call.
    pub fn iterate(&mut self, q_wall: f64, n: u64) -> Result<(), SolverError> {
        for _ in 0..n {
            self.pseudo_step(q_wall)?;
        }
        Ok(())
    }

    /// March to steady state at the given wall heat flux, starting from the
    /// current field (call [`reset`](Self::reset) first for a cold start).
    ///
    /// Convergence requires both the residual drop and the mass-imbalance
    /// tolerance; runs that stall (choked or unstarted transients) return
    /// with `converged = false` rather than erroring so sweeps can continue.
    pub fn run_to_steady(&mut self, q_wall: f64) -> Result<SteadyResult, SolverError> {
        let mut history = Vec::new();
        let mut ref_mass = 0.0_f64;
        let mut ref_energy = 0.0_f64;
        let mut converged = false;
        let start_iteration = self.iterations;
        // Trailing thrust window for limit-cycle regimes.
        let window = (self.config.max_iterations / 8).clamp(500, 20_000) as usize;
        let mut thrust_ring: Vec<f64> = Vec::with_capacity(window);
        let mut ring_pos = 0usize;

        let mut iter = 0;
        while iter < self.config.max_iterations {
            let (rms_mass, rms_energy) = match self.pseudo_step(q_wall) {
                Ok(norms) => norms,
                Err(SolverError::StepRejected { cell, iteration }) => {
                    return Err(SolverError::StepRejected { cell, iteration })
                }
                Err(e) => return Err(e),
            };
            iter += 1;

            if !rms_mass.is_finite() || !rms_energy.is_finite() {
                return Err(SolverError::Diverged {
                    iteration: self.iterations,
                    rms_mass,
                    bound: f64::INFINITY,
                    history,
                });
            }
            if iter <= 100 {
                ref_mass = ref_mass.max(rms_mass);
                ref_energy = ref_energy.max(rms_energy);
            }

            if thrust_ring.len() < window {
                thrust_ring.push(self.thrust());
            } else {
                thrust_ring[ring_pos] = self.thrust();
                ring_pos = (ring_pos + 1) % window;
            }

            let imbalance = self.mass_imbalance();
            if iter % self.config.residual_stride == 0 || iter == 1 {
                history.push(ResidualSample {
                    iteration: self.iterations,
                    rms_mass,
                    rms_energy,
                    mass_imbalance: imbalance,
                });
            }

            if iter > 100 {
                let bound = self.config.divergence_factor * ref_mass.max(1e-300);
                if rms_mass > bound {
                    return Err(SolverError::Diverged {
                        iteration: self.iterations,
                        rms_mass,
                        bound,
                        history,
                    });
                }
                let drop_ok = (rms_mass <= ref_mass / self.config.residual_drop
                    && rms_energy <= ref_energy / self.config.residual_drop)
                    || (rms_mass < 1e-10 && rms_energy < 1e-10);
                if drop_ok && imbalance < self.config.mass_imbalance_tol {
                    converged = true;
                    history.push(ResidualSample {
                        iteration: self.iterations,
                        rms_mass,
                        rms_energy,
                        mass_imbalance: imbalance,
                    });
                    break;
                }
            }
        }

        let field = self.field();
        let unstart = detect_unstart(&field, &self.bc, &self.grid, &self.geometry);
        let thrust = self.thrust();
        let thrust_mean = if converged || thrust_ring.is_empty() {
            thrust
        } else {
            thrust_ring.iter().sum::<f64>() / thrust_ring.len() as f64
        };
        Ok(SteadyResult {
            thrust,
            thrust_mean,
            converged,
            unstart,
            iterations: self.iterations - start_iteration,
            mass_imbalance: self.mass_imbalance(),
            residual_history: history,
            outlet_switched: self.outlet_switched,
            heated_wall_area: self.grid.heated_wall_area(),
            final_conserved: self.u.clone(),
            field,
        })
    }
}

/// Unstart test: the inlet channel has lost supersonic flow, or the inlet
/// plane pressure exceeds the prescribed value by more than 5%.
///
/// The Mach criterion is judged on inlet-channel cells upstream of the
/// smeared dump, with a two-smear-width margin so the standing dump shock's
/// numerical structure (which straddles the junction at high heat flux) is
/// not mistaken for an expelled shock. Meaningful for supersonic-inlet
/// configurations; subsonic-inflow ducts should read the pressure ratio
/// directly.
pub fn detect_unstart(
    field: &[FlowState],
    bc: &BoundaryCondition,
    grid: &Grid,
    geometry: &EngineGeometry,
) -> UnstartReport {
    let channel_end = geometry.dump_plane - 2.0 * grid.smear_width;
    let mut min_inlet_mach = f64::INFINITY;
    let mut max_combustor_mach: f64 = 0.0;
    for (i, s) in field.iter().enumerate() {
        let x = grid.x_centers[i];
        if x < channel_end {
            min_inlet_mach = min_inlet_mach.min(s.mach);
        }
        if x >= geometry.heated_span.0 && x <= geometry.heated_span.1 {
            max_combustor_mach = max_combustor_mach.max(s.mach);
        }
    }
    let inlet_plane_pressure = field[0].p;
    let inlet_pressure_ratio = inlet_plane_pressure / bc.inlet.pressure;
    UnstartReport {
        unstarted: min_inlet_mach < 1.0 || inlet_pressure_ratio > 1.05,
        min_inlet_mach,
        max_combustor_mach,
        inlet_plane_pressure,
        inlet_pressure_ratio,
    }
}
