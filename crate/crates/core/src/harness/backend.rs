//! Engine backends for the closed-loop harness: the full finite-volume
//! solver, the envelope-table surrogate, and a linear surrogate plant for
//! cheap controller studies.

use crate::engine::{
    detect_unstart, BoundaryCondition, EngineGeometry, EngineSolver, OutletMode, SolverConfig,
    SolverError,
};
use crate::envelope::{EnvelopeError, EnvelopeTable};
use crate::gas::GasModel;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum BackendError {
    #[error(transparent)]
    Solver(#[from] SolverError),
    #[error(transparent)]
    Envelope(#[from] EnvelopeError),
    #[error("backend does not support flight-condition updates")]
    FlightConditionUnsupported,
}

/// A thrust plant the harness can regulate: apply a wall heat flux, advance,
/// read thrust.
pub trait EngineBackend {
    /// Settle at the given heat flux before the closed loop starts.
    fn settle(&mut self, w: f64) -> Result<(), BackendError>;
    /// Advance by one control step at heat flux `w`.
    fn advance(&mut self, w: f64, inner_iterations: u64) -> Result<(), BackendError>;
    /// Thrust of the current state, N.
    fn thrust(&self) -> f64;
    /// Whether the current state is unstarted.
    fn unstarted(&self) -> bool;
    /// Latest RMS mass residual (0 for surrogates).
    fn residual(&self) -> f64 {
        0.0
    }
    /// Move the operating point (engagement use). Backends tied to one
    /// operating point reject this.
    fn set_flight_condition(&mut self, _altitude: f64, _velocity: f64) -> Result<(), BackendError> {
        Err(BackendError::FlightConditionUnsupported)
    }
}

/// The quasi-1D solver in the loop. Each control step advances a fixed
/// iteration budget rather than re-converging, so the controller sees the
/// quasi-steady response.
pub struct FullEngineBackend {
    solver: EngineSolver,
    last_residual: f64,
}

impl FullEngineBackend {
    pub fn new(
        geometry: EngineGeometry,
        bc: BoundaryCondition,
        config: SolverConfig,
        gas: GasModel,
    ) -> Self {
        Self {
            solver: EngineSolver::new(geometry, bc, config, gas),
            last_residual: 0.0,
        }
    }

    pub fn solver(&self) -> &EngineSolver {
        &self.solver
    }

    pub fn solver_mut(&mut self) -> &mut EngineSolver {
        &mut self.solver
    }
}

impl EngineBackend for FullEngineBackend {
    fn settle(&mut self, w: f64) -> Result<(), BackendError> {
        let result = self.solver.run_to_steady(w)?;
        self.last_residual = result
            .residual_history
            .last()
            .map(|h| h.rms_mass)
            .unwrap_or(0.0);
        Ok(())
    }

    fn advance(&mut self, w: f64, inner_iterations: u64) -> Result<(), BackendError> {
        self.solver.iterate(w, inner_iterations)?;
        Ok(())
    }

    fn thrust(&self) -> f64 {
        self.solver.thrust()
    }

    fn unstarted(&self) -> bool {
        let field = self.solver.field();
        detect_unstart(
            &field,
            self.solver.boundary_condition(),
            self.solver.grid(),
            self.solver.geometry(),
        )
        .unstarted
    }

    fn residual(&self) -> f64 {
        self.last_residual
    }

    fn set_flight_condition(&mut self, altitude: f64, velocity: f64) -> Result<(), BackendError> {
        let inlet = crate::envelope::flight_inlet(altitude, velocity)
            .map_err(|_| BackendError::FlightConditionUnsupported)?;
        let gas = *self.solver.gas();
        let bc = BoundaryCondition::new(
            inlet,
            OutletMode::Auto {
                back_pressure: inlet.pressure,
            },
            &gas,
        );
        self.solver.set_boundary_condition(bc);
        Ok(())
    }
}

/// Envelope-table surrogate: steady thrust from trilinear interpolation with
/// a first-order lag standing in for the combustor fill dynamics.
pub struct SurrogateBackend {
    table: EnvelopeTable,
    altitude: f64,
    velocity: f64,
    thrust: f64,
    /// Fraction of the remaining step response covered per control step.
    pub response: f64,
    unstarted: bool,
}

impl SurrogateBackend {
    pub fn new(table: EnvelopeTable, altitude: f64, velocity: f64) -> Self {
        Self {
            table,
            altitude,
            velocity,
            thrust: 0.0,
            response: 0.6,
            unstarted: false,
        }
    }

    pub fn table(&self) -> &EnvelopeTable {
        &self.table
    }
}

impl EngineBackend for SurrogateBackend {
    fn settle(&mut self, w: f64) -> Result<(), BackendError> {
        self.thrust = self.table.thrust(self.altitude, self.velocity, w)?;
        self.unstarted = false;
        Ok(())
    }

    fn advance(&mut self, w: f64, _inner_iterations: u64) -> Result<(), BackendError> {
        let target = self.table.thrust(self.altitude, self.velocity, w)?;
        self.thrust += self.response * (target - self.thrust);
        Ok(())
    }

    fn thrust(&self) -> f64 {
        self.thrust
    }

    fn unstarted(&self) -> bool {
        self.unstarted
    }

    fn set_flight_condition(&mut self, altitude: f64, velocity: f64) -> Result<(), BackendError> {
        self.altitude = altitude;
        self.velocity = velocity;
        Ok(())
    }
}

/// First-order linear plant: y tracks dc_gain (w - w_ref) + y_ref with the
/// given per-step response fraction. Used for fast hyperparameter studies
/// and controller property tests.
pub struct LtiBackend {
    pub dc_gain: f64,
    pub w_ref: f64,
    pub y_ref: f64,
    pub response: f64,
    thrust: f64,
}

impl LtiBackend {
    pub fn new(dc_gain: f64, w_ref: f64, y_ref: f64, response: f64) -> Self {
        Self {
            dc_gain,
            w_ref,
            y_ref,
            response,
            thrust: y_ref,
        }
    }

    /// Plant resembling the engine around its nominal point: 1.5e-4 N per
    /// W/m^2 of heat flux, 600 N at the nominal flux.
    pub fn engine_like() -> Self {
        Self::new(1.5e-4, 10.0e6, 600.0, 0.6)
    }
}

impl EngineBackend for LtiBackend {
    fn settle(&mut self, w: f64) -> Result<(), BackendError> {
        self.thrust = self.y_ref + self.dc_gain * (w - self.w_ref);
        Ok(())
    }

    fn advance(&mut self, w: f64, _inner_iterations: u64) -> Result<(), BackendError> {
        let target = self.y_ref + self.dc_gain * (w - self.w_ref);
        self.thrust += self.response * (target - self.thrust);
        Ok(())
    }

    fn thrust(&self) -> f64 {
        self.thrust
    }

    fn unstarted(&self) -> bool {
        false
    }
}
