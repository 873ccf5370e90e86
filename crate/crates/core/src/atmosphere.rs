//! Standard-atmosphere troposphere model.
//!
//! Linear lapse rate with the hydrostatic power law, valid for geometric
//! altitudes 0..=11 km. This is all the operational envelope and the
//! engagement scenario need; the stratosphere is deliberately not modeled.

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub const SEA_LEVEL_TEMPERATURE: f64 = 288.15;
pub const SEA_LEVEL_PRESSURE: f64 = 101_325.0;
pub const LAPSE_RATE: f64 = 0.0065;
pub const GRAVITY: f64 = 9.80665;
pub const GAS_CONSTANT_AIR: f64 = 287.0;
pub const TROPOPAUSE_ALTITUDE: f64 = 11_000.0;

#[derive(Debug, Error)]
pub enum AtmoError {
    #[error("altitude {0} m outside the modeled troposphere [0, 11000] m")]
    AltitudeOutOfRange(f64),
}

/// Atmospheric state at one altitude.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AtmoState {
    /// Geometric altitude, m.
    pub h: f64,
    /// Temperature, K.
    pub t: f64,
    /// Pressure, Pa.
    pub p: f64,
    /// Density, kg/m^3.
    pub rho: f64,
}

/// Standard-atmosphere state at altitude `h` (m), troposphere only.
pub fn isa(h: f64) -> Result<AtmoState, AtmoError> {
    if !(0.0..=TROPOPAUSE_ALTITUDE).contains(&h) {
        return Err(AtmoError::AltitudeOutOfRange(h));
    }
    let t = SEA_LEVEL_TEMPERATURE - LAPSE_RATE * h;
    let exponent = GRAVITY / (LAPSE_RATE * GAS_CONSTANT_AIR);
    let p = SEA_LEVEL_PRESSURE * (t / SEA_LEVEL_TEMPERATURE).powf(exponent);
    let rho = p / (GAS_CONSTANT_AIR * t);
    Ok(AtmoState { h, t, p, rho })
}
