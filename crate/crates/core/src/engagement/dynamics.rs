//! Planar longitudinal flight dynamics: point-mass translation plus a
//! short-period pitch approximation, integrated with fixed-step RK4.

use crate::atmosphere::{isa, GRAVITY};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum DynamicsError {
    #[error("non-physical vehicle state: {0}")]
    NonPhysical(String),
    #[error("altitude left the modeled atmosphere: {0} m")]
    OutsideAtmosphere(f64),
}

/// Planar vehicle state.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VehicleState {
    /// Downrange position, m.
    pub x: f64,
    /// Altitude, m.
    pub z: f64,
    /// Speed along the velocity vector, m/s.
    pub v: f64,
    /// Flight-path angle, rad.
    pub gamma: f64,
    /// Angle of attack, rad.
    pub alpha: f64,
    /// Pitch rate, rad/s.
    pub omega: f64,
    pub mass: f64,
}

impl VehicleState {
    pub fn velocity_components(&self) -> (f64, f64) {
        (self.v * self.gamma.cos(), self.v * self.gamma.sin())
    }
}

/// Aerodynamic and inertial coefficients of the pursuer airframe
/// (canard convention: positive fin deflection pitches nose up).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AirframeConfig {
    pub s_ref: f64,
    pub chord: f64,
    pub i_yy: f64,
    pub c_l_alpha: f64,
    pub c_l_delta: f64,
    pub c_d0: f64,
    pub k_induced: f64,
    pub c_m_alpha: f64,
    pub c_m_delta: f64,
    pub c_m_q: f64,
}

impl AirframeConfig {
    /// Default airframe sized so that drag at Mach 2.5 / 7 km under trim
    /// lift equals the 12 kN thrust command (level-thrust engagement).
    pub fn trimmed_default(mass: f64, trim_thrust: f64) -> Self {
        let atmo = isa(7_000.0).expect("7 km is inside the troposphere");
        let v = 2.5 * (1.4 * 287.0 * atmo.t).sqrt();
        let q_bar = 0.5 * atmo.rho * v * v;
        let s_ref = 0.15;
        let k_induced = 0.3;
        let c_l_trim = mass * GRAVITY / (q_bar * s_ref);
        let c_d0 = trim_thrust / (q_bar * s_ref) - k_induced * c_l_trim * c_l_trim;
        Self {
            s_ref,
            chord: 0.3,
            i_yy: 110.0,
            c_l_alpha: 3.5,
            c_l_delta: 0.8,
            c_d0,
            k_induced,
            c_m_alpha: -8.0,
            c_m_delta: 12.0,
            c_m_q: -40.0,
        }
    }
}

/// Forces and pitch moment at one state.
#[derive(Debug, Clone, Copy)]
pub struct AeroForces {
    pub lift: f64,
    pub drag: f64,
    pub moment: f64,
    pub dynamic_pressure: f64,
}

pub fn aero_forces(
    state: &VehicleState,
    delta: f64,
    airframe: &AirframeConfig,
) -> Result<AeroForces, DynamicsError> {
    let atmo = isa(state.z).map_err(|_| DynamicsError::OutsideAtmosphere(state.z))?;
    let q_bar = 0.5 * atmo.rho * state.v * state.v;
    let c_l = airframe.c_l_alpha * state.alpha + airframe.c_l_delta * delta;
    let c_d = airframe.c_d0 + airframe.k_induced * c_l * c_l;
    let c_m = airframe.c_m_alpha * state.alpha
        + airframe.c_m_delta * delta
        + airframe.c_m_q * state.omega * airframe.chord / (2.0 * state.v);
    Ok(AeroForces {
        lift: q_bar * airframe.s_ref * c_l,
        drag: q_bar * airframe.s_ref * c_d,
        moment: q_bar * airframe.s_ref * airframe.chord * c_m,
        dynamic_pressure: q_bar,
    })
}

/// Measured normal (load-factor) acceleration, m/s^2.
pub fn normal_acceleration(
    state: &VehicleState,
    delta: f64,
    thrust: f64,
    airframe: &AirframeConfig,
) -> Result<f64, DynamicsError> {
    let aero = aero_forces(state, delta, airframe)?;
    Ok((aero.lift + thrust * state.alpha.sin()) / state.mass)
}

fn derivatives(
    state: &VehicleState,
    delta: f64,
    thrust: f64,
    airframe: &AirframeConfig,
) -> Result<[f64; 6], DynamicsError> {
    let aero = aero_forces(state, delta, airframe)?;
    let (m, v) = (state.mass, state.v);
    let gamma_dot =
        (aero.lift + thrust * state.alpha.sin()) / (m * v) - GRAVITY * state.gamma.cos() / v;
    Ok([
        v * state.gamma.cos(),
        v * state.gamma.sin(),
        (thrust * state.alpha.cos() - aero.drag) / m - GRAVITY * state.gamma.sin(),
        gamma_dot,
        state.omega - gamma_dot,
        aero.moment / airframe.i_yy,
    ])
}

fn apply(state: &VehicleState, d: &[f64; 6], dt: f64) -> VehicleState {
    VehicleState {
        x: state.x + dt * d[0],
        z: state.z + dt * d[1],
        v: state.v + dt * d[2],
        gamma: state.gamma + dt * d[3],
        alpha: state.alpha + dt * d[4],
        omega: state.omega + dt * d[5],
        mass: state.mass,
    }
}

/// One RK4 step of the pursuer dynamics at fixed fin deflection and thrust.
pub fn step_dynamics(
    state: &VehicleState,
    delta: f64,
    thrust: f64,
    dt: f64,
    airframe: &AirframeConfig,
) -> Result<VehicleState, DynamicsError> {
    assert!(dt > 0.0, "time step must be positive");
    let k1 = derivatives(state, delta, thrust, airframe)?;
    let k2 = derivatives(&apply(state, &k1, 0.5 * dt), delta, thrust, airframe)?;
    let k3 = derivatives(&apply(state, &k2, 0.5 * dt), delta, thrust, airframe)?;
    let k4 = derivatives(&apply(state, &k3, dt), delta, thrust, airframe)?;
    let mut d = [0.0; 6];
    for i in 0..6 {
        d[i] = (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]) / 6.0;
    }
    let next = apply(state, &d, dt);
    if !(next.v > 0.0) || !next.v.is_finite() {
        return Err(DynamicsError::NonPhysical(format!("speed {}", next.v)));
    }
    Ok(next)
}

/// Constant-thrust level-flight evader: altitude fixed, speed driven by
/// thrust minus drag.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EvaderConfig {
    pub thrust: f64,
    pub mass: f64,
    pub drag_area: f64,
}

impl EvaderConfig {
    /// The benchmark evader: 10,000 kg at constant 76,310 N thrust.
    pub fn benchmark() -> Self {
        Self {
            thrust: 76_310.0,
            mass: 10_000.0,
            drag_area: 2.4,
        }
    }
}

pub fn step_evader(
    state: &VehicleState,
    cfg: &EvaderConfig,
    dt: f64,
) -> Result<VehicleState, DynamicsError> {
    let atmo = isa(state.z).map_err(|_| DynamicsError::OutsideAtmosphere(state.z))?;
    let accel = |v: f64| -> f64 {
        let drag = 0.5 * atmo.rho * v * v * cfg.drag_area;
        (cfg.thrust - drag) / cfg.mass
    };
    let k1 = accel(state.v);
    let k2 = accel(state.v + 0.5 * dt * k1);
    let k3 = accel(state.v + 0.5 * dt * k2);
    let k4 = accel(state.v + dt * k3);
    let dv = dt * (k1 + 2.0 * k2 + 2.0 * k3 + k4) / 6.0;
    Ok(VehicleState {
        x: state.x + dt * (state.v + 0.5 * dv),
        v: state.v + dv,
        ..*state
    })
}

/// Linearized short-period model at a flight condition, for autopilot gain
/// design and closed-loop verification.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ShortPeriodModel {
    /// d(alpha_dot)/d(alpha), 1/s.
    pub z_alpha: f64,
    /// d(alpha_dot)/d(delta), 1/s.
    pub z_delta: f64,
    /// d(q_dot)/d(alpha), 1/s^2.
    pub m_alpha: f64,
    /// d(q_dot)/d(q), 1/s.
    pub m_q: f64,
    /// d(q_dot)/d(delta), 1/s^2.
    pub m_delta: f64,
    /// d(a_z)/d(alpha), m/s^2 per rad.
    pub a_alpha: f64,
    /// d(a_z)/d(delta), m/s^2 per rad.
    pub a_delta: f64,
}

/// Linearize the airframe at (altitude, speed, mass, thrust).
pub fn linearize(
    altitude: f64,
    v: f64,
    mass: f64,
    thrust: f64,
    airframe: &AirframeConfig,
) -> ShortPeriodModel {
    let atmo = isa(altitude).expect("altitude inside troposphere");
    let q_bar = 0.5 * atmo.rho * v * v;
    let qs = q_bar * airframe.s_ref;
    let a_alpha = (qs * airframe.c_l_alpha + thrust) / mass;
    let a_delta = qs * airframe.c_l_delta / mass;
    ShortPeriodModel {
        z_alpha: -a_alpha / v,
        z_delta: -a_delta / v,
        m_alpha: qs * airframe.chord * airframe.c_m_alpha / airframe.i_yy,
        m_q: qs * airframe.chord * airframe.chord * airframe.c_m_q
            / (2.0 * v * airframe.i_yy),
        m_delta: qs * airframe.chord * airframe.c_m_delta / airframe.i_yy,
        a_alpha,
        a_delta,
    }
}
