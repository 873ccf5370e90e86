//! Proportional-navigation guidance in the vertical plane.

use super::dynamics::VehicleState;
use serde::{Deserialize, Serialize};

/// Relative engagement geometry between pursuer and evader.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Los {
    /// Range, m.
    pub range: f64,
    /// Line-of-sight angle, rad.
    pub beta: f64,
    /// Line-of-sight rate, rad/s.
    pub beta_dot: f64,
    /// Closing velocity (-dR/dt), m/s.
    pub closing_velocity: f64,
}

/// Range, line-of-sight angle and their rates from the two vehicle states.
pub fn line_of_sight(pursuer: &VehicleState, evader: &VehicleState) -> Los {
    let dx = evader.x - pursuer.x;
    let dz = evader.z - pursuer.z;
    let (pvx, pvz) = pursuer.velocity_components();
    let (evx, evz) = evader.velocity_components();
    let dvx = evx - pvx;
    let dvz = evz - pvz;
    let range = (dx * dx + dz * dz).sqrt().max(1e-9);
    Los {
        range,
        beta: dz.atan2(dx),
        beta_dot: (dx * dvz - dz * dvx) / (range * range),
        closing_velocity: -(dx * dvx + dz * dvz) / range,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GuidanceConfig {
    /// Navigation constant N'.
    pub navigation_constant: f64,
    /// Acceleration command limit, m/s^2.
    pub accel_limit: f64,
}

impl Default for GuidanceConfig {
    fn default() -> Self {
        Self {
            navigation_constant: 4.0,
            accel_limit: 30.0 * 9.80665,
        }
    }
}

/// Proportional navigation: a_zc = N' Vc beta_dot, saturated at the g-limit.
pub fn guidance(los: &Los, cfg: &GuidanceConfig) -> f64 {
    (cfg.navigation_constant * los.closing_velocity * los.beta_dot)
        .clamp(-cfg.accel_limit, cfg.accel_limit)
}
