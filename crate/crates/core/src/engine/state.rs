//! Conservative <-> primitive conversions for the quasi-1D solver.
//!
//! Conserved quantities are stored per unit length: (rho A, rho u A, rho E A).

use crate::gas::{close_pressure, FlowState, GasModel};

/// Per-length conserved variables of one cell.
pub type Conserved = [f64; 3];

/// Primitive working set (rho, u, p).
pub type Primitive = [f64; 3];

/// Encode a primitive state into per-length conserved variables on area `a`.
pub fn encode(rho: f64, u: f64, p: f64, a: f64, gas: &GasModel) -> Conserved {
    let e = p / ((gas.gamma - 1.0) * rho) + 0.5 * u * u;
    [rho * a, rho * u * a, rho * e * a]
}

/// Decode per-length conserved variables on area `a`. Returns `None` when the
/// state is unphysical (non-positive density or pressure).
pub fn decode(u: &Conserved, a: f64, gas: &GasModel) -> Option<Primitive> {
    let rho = u[0] / a;
    if !(rho > 0.0) || !rho.is_finite() {
        return None;
    }
    let vel = u[1] / u[0];
    let e = u[2] / u[0];
    let p = close_pressure(rho, e, vel, gas);
    if !(p > 0.0) || !p.is_finite() || !vel.is_finite() {
        return None;
    }
    Some([rho, vel, p])
}

/// Full flow state (with T and M) from a primitive triple.
pub fn primitive_to_state(w: &Primitive, gas: &GasModel) -> FlowState {
    FlowState::from_primitive(w[0], w[1], w[2], gas)
        .expect("primitive triple validated at decode time")
}
