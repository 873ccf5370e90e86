//! Dynamic-conditions scenario: planar pursuit of a constant-thrust evader
//! by a missile whose engine thrust is regulated by the adaptive controller
//! while altitude and Mach vary along the trajectory.

pub mod autopilot;
pub mod dynamics;
pub mod guidance;

pub use autopilot::{design_gains, Autopilot, AutopilotGains};
pub use dynamics::{
    linearize, normal_acceleration, step_dynamics, step_evader, AirframeConfig, DynamicsError,
    EvaderConfig, ShortPeriodModel, VehicleState,
};
pub use guidance::{guidance, line_of_sight, GuidanceConfig, Los};

use crate::atmosphere::isa;
use crate::gas::GasModel;
use crate::harness::{BackendError, EngineBackend};
use crate::rcac::{controller_step, MapConfig, RcacConfig, RcacState};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum EngagementError {
    #[error(transparent)]
    Dynamics(#[from] DynamicsError),
    #[error(transparent)]
    Backend(#[from] BackendError),
    #[error("controller failed at t = {t:.3} s: {source}")]
    Controller {
        t: f64,
        source: crate::rcac::RcacError,
    },
    #[error("invalid engagement configuration: {0}")]
    InvalidConfig(String),
}

/// Scenario configuration. Defaults reproduce the benchmark engagement:
/// a 10,000 kg evader at Mach 0.75 / 8 km with 76,310 N of constant thrust,
/// 2 km ahead of a 204 kg pursuer at Mach 2.5 / 7 km commanding 12 kN.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EngagementConfig {
    pub evader: EvaderConfig,
    pub evader_mach: f64,
    pub evader_altitude: f64,
    pub evader_offset: f64,
    pub pursuer_mass: f64,
    pub pursuer_mach: f64,
    pub pursuer_altitude: f64,
    /// Initial flight-path angle, rad.
    pub pursuer_gamma: f64,
    /// Initial angle of attack, rad.
    pub pursuer_alpha: f64,
    pub thrust_command: f64,
    pub guidance: GuidanceConfig,
    /// Autopilot gains; None designs them on the linearized short-period
    /// model at the initial flight condition.
    pub autopilot_gains: Option<AutopilotGains>,
    /// Outer dynamics step, s.
    pub dt: f64,
    /// Engine-controller update period, s.
    pub engine_period: f64,
    /// Solver iterations per engine update (full backend).
    pub engine_inner_iterations: u64,
    pub capture_radius: f64,
    pub timeout: f64,
    pub rcac: RcacConfig,
}

impl Default for EngagementConfig {
    fn default() -> Self {
        Self {
            evader: EvaderConfig::benchmark(),
            evader_mach: 0.75,
            evader_altitude: 8_000.0,
            evader_offset: 2_000.0,
            pursuer_mass: 204.0,
            pursuer_mach: 2.5,
            pursuer_altitude: 7_000.0,
            pursuer_gamma: 10.0_f64.to_radians(),
            pursuer_alpha: 1.0_f64.to_radians(),
            thrust_command: 12_000.0,
            guidance: GuidanceConfig::default(),
            autopilot_gains: None,
            dt: 0.01,
            engine_period: 0.05,
            engine_inner_iterations: 300,
            capture_radius: 5.0,
            timeout: 60.0,
            rcac: RcacConfig {
                error_scale: 0.03,
                ..RcacConfig::default()
            },
        }
    }
}

/// One logged time step.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EngagementRow {
    pub t: f64,
    pub pursuer: VehicleState,
    pub evader: VehicleState,
    pub range: f64,
    pub beta: f64,
    pub a_zc: f64,
    pub a_z: f64,
    pub omega: f64,
    pub delta: f64,
    pub tau_c: f64,
    pub tau: f64,
    pub u: f64,
    pub w: f64,
    pub k_p: f64,
    pub k_i: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Outcome {
    /// Range crossed below the capture radius.
    Intercept,
    /// Timeout without capture.
    Miss,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EngagementLog {
    pub rows: Vec<EngagementRow>,
    pub outcome: Outcome,
    /// Closest approach over the whole engagement, m.
    pub miss_distance: f64,
    /// Time of the closest approach, s.
    pub intercept_time: f64,
    pub autopilot_gains: AutopilotGains,
}

impl EngagementLog {
    /// CSV export, one row per dynamics step.
    pub fn to_csv(&self) -> String {
        let mut out = String::from(
            "t,px,pz,pv,pgamma,palpha,pomega,ex,ez,ev,R,beta,a_zc,a_z,omega,delta,tau_c,tau,u,w,K_P,K_I\n",
        );
        for r in &self.rows {
            out.push_str(&format!(
                "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}\n",
                r.t,
                r.pursuer.x,
                r.pursuer.z,
                r.pursuer.v,
                r.pursuer.gamma,
                r.pursuer.alpha,
                r.pursuer.omega,
                r.evader.x,
                r.evader.z,
                r.evader.v,
                r.range,
                r.beta,
                r.a_zc,
                r.a_z,
                r.omega,
                r.delta,
                r.tau_c,
                r.tau,
                r.u,
                r.w,
                r.k_p,
                r.k_i
            ));
        }
        out
    }
}

/// Closest approach of the linearly-interpolated relative motion across one
/// step; returns (min range, fraction of the step).
fn closest_approach(rel0: (f64, f64), rel1: (f64, f64)) -> (f64, f64) {
    let (x0, z0) = rel0;
    let (dx, dz) = (rel1.0 - x0, rel1.1 - z0);
    let denom = dx * dx + dz * dz;
    let t = if denom > 0.0 {
        (-(x0 * dx + z0 * dz) / denom).clamp(0.0, 1.0)
    } else {
        0.0
    };
    let (cx, cz) = (x0 + t * dx, z0 + t * dz);
    ((cx * cx + cz * cz).sqrt(), t)
}

/// Run the engagement: guidance, autopilot and airframe at the fast rate,
/// the engine controller at its own period, thrust held between updates.
pub fn run_engagement<B: EngineBackend>(
    cfg: &EngagementConfig,
    backend: &mut B,
    map: &MapConfig,
) -> Result<EngagementLog, EngagementError> {
    if cfg.dt <= 0.0 || cfg.engine_period < cfg.dt {
        return Err(EngagementError::InvalidConfig(
            "need dt > 0 and engine_period >= dt".into(),
        ));
    }
    let atmo_e = isa(cfg.evader_altitude)
        .map_err(|e| EngagementError::InvalidConfig(e.to_string()))?;
    let atmo_p = isa(cfg.pursuer_altitude)
        .map_err(|e| EngagementError::InvalidConfig(e.to_string()))?;
    let gas = GasModel::air();
    let mut evader = VehicleState {
        x: cfg.evader_offset,
        z: cfg.evader_altitude,
        v: cfg.evader_mach * gas.sound_speed(atmo_e.t),
        gamma: 0.0,
        alpha: 0.0,
        omega: 0.0,
        mass: cfg.evader.mass,
    };
    let mut pursuer = VehicleState {
        x: 0.0,
        z: cfg.pursuer_altitude,
        v: cfg.pursuer_mach * gas.sound_speed(atmo_p.t),
        gamma: cfg.pursuer_gamma,
        alpha: cfg.pursuer_alpha,
        omega: 0.0,
        mass: cfg.pursuer_mass,
    };
    let airframe = AirframeConfig::trimmed_default(cfg.pursuer_mass, cfg.thrust_command);
    let gains = cfg.autopilot_gains.unwrap_or_else(|| {
        let sp = linearize(
            cfg.pursuer_altitude,
            pursuer.v,
            cfg.pursuer_mass,
            cfg.thrust_command,
            &airframe,
        );
        design_gains(&sp)
    });
    let mut autopilot = Autopilot::new(gains);

    backend.set_flight_condition(pursuer.z, pursuer.v)?;
    backend.settle(map.w_bar)?;
    let mut rcac = RcacState::new(&cfg.rcac);
    let mut last_decision: Option<crate::rcac::ControlDecision> = None;

    let engine_every = (cfg.engine_period / cfg.dt).round().max(1.0) as u64;
    let n_steps = (cfg.timeout / cfg.dt).ceil() as u64;
    let mut rows = Vec::new();
    let mut delta = 0.0;
    let mut miss_distance = f64::INFINITY;
    let mut intercept_time = 0.0;
    let mut outcome = Outcome::Miss;

    for k in 0..n_steps {
        let t = k as f64 * cfg.dt;
        // Engine controller at its own period.
        if k % engine_every == 0 {
            let tau = backend.thrust();
            let decision = controller_step(&mut rcac, tau - cfg.thrust_command, &cfg.rcac, map)
                .map_err(|source| EngagementError::Controller { t, source })?;
            backend.set_flight_condition(pursuer.z, pursuer.v)?;
            backend.advance(decision.w, cfg.engine_inner_iterations)?;
            last_decision = Some(decision);
        }
        let decision = last_decision.expect("engine updates start at k = 0");
        let tau = backend.thrust();

        let los = line_of_sight(&pursuer, &evader);
        let a_zc = guidance(&los, &cfg.guidance);
        let a_z = normal_acceleration(&pursuer, delta, tau, &airframe)?;
        delta = autopilot.update(a_zc, a_z, pursuer.omega, cfg.dt);

        rows.push(EngagementRow {
            t,
            pursuer,
            evader,
            range: los.range,
            beta: los.beta,
            a_zc,
            a_z,
            omega: pursuer.omega,
            delta,
            tau_c: cfg.thrust_command,
            tau,
            u: decision.u,
            w: decision.w,
            k_p: decision.theta[0],
            k_i: decision.theta[1],
        });

        let rel0 = (evader.x - pursuer.x, evader.z - pursuer.z);
        pursuer = step_dynamics(&pursuer, delta, tau, cfg.dt, &airframe)?;
        evader = step_evader(&evader, &cfg.evader, cfg.dt)?;
        let rel1 = (evader.x - pursuer.x, evader.z - pursuer.z);
        let (r_min, frac) = closest_approach(rel0, rel1);
        if r_min < miss_distance {
            miss_distance = r_min;
            intercept_time = t + frac * cfg.dt;
        }
        if r_min < cfg.capture_radius {
            outcome = Outcome::Intercept;
            break;
        }
    }

    Ok(EngagementLog {
        rows,
        outcome,
        miss_distance,
        intercept_time,
        autopilot_gains: gains,
    })
}

/// Engine prepared for an engagement: geometry scaled so the thrust command
/// sits mid-envelope at the initial flight condition, the recentred heat-flux
/// map, and the envelope table for the surrogate backend.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EngagementEngine {
    pub scale: f64,
    pub geometry: crate::engine::EngineGeometry,
    pub calibration: crate::harness::Calibration,
    pub map: MapConfig,
    pub table: crate::envelope::EnvelopeTable,
}

/// Build the scaled engine for a scenario. One nominal-size sweep at the
/// initial flight condition sizes the scale factor (thrust scales exactly
/// with the square of the geometric scale under similarity); the envelope
/// table is then solved on the scaled geometry over the flight axes.
pub fn prepare_engine(
    cfg: &EngagementConfig,
    solver_config: crate::engine::SolverConfig,
    gas: GasModel,
    altitudes: &[f64],
    velocities: &[f64],
    fluxes: &[f64],
) -> Result<EngagementEngine, EngagementError> {
    use crate::engine::{BoundaryCondition, EngineGeometry, GeometryConfig, OutletMode};
    use crate::envelope::{build_envelope, flight_inlet, heat_flux_sweep, SweepPolicy};
    use crate::harness::Calibration;

    let atmo = isa(cfg.pursuer_altitude)
        .map_err(|e| EngagementError::InvalidConfig(e.to_string()))?;
    let v0 = cfg.pursuer_mach * gas.sound_speed(atmo.t);
    let inlet = flight_inlet(cfg.pursuer_altitude, v0)
        .map_err(|e| EngagementError::InvalidConfig(e.to_string()))?;
    let bc = BoundaryCondition::new(
        inlet,
        OutletMode::Auto {
            back_pressure: inlet.pressure,
        },
        &gas,
    );
    let nominal = EngineGeometry::default_engine();
    let sweep = heat_flux_sweep(
        &nominal,
        bc,
        solver_config,
        gas,
        fluxes,
        SweepPolicy::default(),
    );
    let calibration = Calibration::from_sweep(&sweep).ok_or_else(|| {
        EngagementError::InvalidConfig("no started envelope at the initial condition".into())
    })?;
    let span_hi = calibration.thrust_span.1;
    if span_hi <= 0.0 {
        return Err(EngagementError::InvalidConfig(
            "engine produces no positive thrust at the initial condition".into(),
        ));
    }
    // Thrust command at 50% of the scaled span.
    let scale = (2.0 * cfg.thrust_command / span_hi).sqrt();
    let geometry = EngineGeometry::build(GeometryConfig {
        scale,
        ..GeometryConfig::default()
    })
    .map_err(|e| EngagementError::InvalidConfig(e.to_string()))?;
    let scaled_calibration = Calibration {
        thrust_span: (
            calibration.thrust_span.0 * scale * scale,
            calibration.thrust_span.1 * scale * scale,
        ),
        ..calibration
    };
    let table = build_envelope(
        &geometry,
        solver_config,
        gas,
        altitudes,
        velocities,
        fluxes,
        SweepPolicy {
            extend_to_unstart: true,
            extend_step: 4.0e6,
            extend_cap: 2.0 * scaled_calibration.max_thrust_flux,
            refine_step: 0.0,
        },
    )
    .map_err(|e| EngagementError::InvalidConfig(e.to_string()))?;
    Ok(EngagementEngine {
        scale,
        geometry,
        calibration: scaled_calibration,
        map: scaled_calibration.map_config(),
        table,
    })
}

/// Default table axes for the benchmark engagement: the flight corridor
/// around 7-8 km and Mach 2.5.
pub fn default_engagement_axes() -> (Vec<f64>, Vec<f64>, Vec<f64>) {
    (
        vec![6_000.0, 7_000.0, 8_000.0, 9_000.0],
        vec![700.0, 750.0, 800.0, 850.0, 900.0],
        (1..=12).map(|i| 4.0e6 * i as f64).collect(),
    )
}
