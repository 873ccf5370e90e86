//! Numerical face fluxes: local Lax-Friedrichs (Rusanov) with optional
//! MUSCL reconstruction and minmod limiting.

use super::state::Primitive;
use crate::gas::GasModel;

/// Minmod slope limiter.
pub fn minmod(a: f64, b: f64) -> f64 {
    if a * b <= 0.0 {
        0.0
    } else if a.abs() < b.abs() {
        a
    } else {
        b
    }
}

/// Physical Euler flux per unit area of a primitive state.
#[inline]
pub fn physical_flux(w: &Primitive, gas: &GasModel) -> [f64; 3] {
    let [rho, u, p] = *w;
    let rho_e = p / (gas.gamma - 1.0) + 0.5 * rho * u * u;
    [rho * u, rho * u * u + p, u * (rho_e + p)]
}

/// Per-unit-area conserved variables of a primitive state.
#[inline]
fn conserved(w: &Primitive, gas: &GasModel) -> [f64; 3] {
    let [rho, u, p] = *w;
    [rho, rho * u, p / (gas.gamma - 1.0) + 0.5 * rho * u * u]
}

/// Rusanov (local Lax-Friedrichs) flux between two primitive states.
#[inline]
pub fn rusanov(left: &Primitive, right: &Primitive, gas: &GasModel) -> [f64; 3] {
    let fl = physical_flux(left, gas);
    let fr = physical_flux(right, gas);
    let ul = conserved(left, gas);
    let ur = conserved(right, gas);
    let al = (gas.gamma * left[2] / left[0]).sqrt();
    let ar = (gas.gamma * right[2] / right[0]).sqrt();
    let s = (left[1].abs() + al).max(right[1].abs() + ar);
    [
        0.5 * (fl[0] + fr[0]) - 0.5 * s * (ur[0] - ul[0]),
        0.5 * (fl[1] + fr[1]) - 0.5 * s * (ur[1] - ul[1]),
        0.5 * (fl[2] + fr[2]) - 0.5 * s * (ur[2] - ul[2]),
    ]
}

/// Maximum signal speed |u| + a of a primitive state.
#[inline]
pub fn signal_speed(w: &Primitive, gas: &GasModel) -> f64 {
    w[1].abs() + (gas.gamma * w[2] / w[0]).sqrt()
}
