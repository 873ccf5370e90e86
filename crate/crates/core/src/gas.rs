//! Perfect-gas and compressible-flow relations.
//!
//! Everything here is a closed-form function of a Mach number and a
//! [`GasModel`]; there is no hidden state, so these double as independent
//! oracles for the finite-volume solver tests (isentropic round trips,
//! Rayleigh heating, choking heat).

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Maximum Mach bracket for the supersonic branch of the area-Mach inversion.
const MACH_BRACKET_MAX: f64 = 50.0;

#[derive(Debug, Error)]
pub enum GasError {
    #[error("Mach number must be positive, got {0}")]
    NonPositiveMach(f64),
    #[error("area ratio A/A* must be >= 1, got {0}")]
    AreaRatioBelowUnity(f64),
    #[error("area-Mach root find did not converge: A/A*={target}, branch {branch:?}, residual {residual:.3e} after {iterations} iterations")]
    RootFindFailed {
        target: f64,
        branch: Branch,
        residual: f64,
        iterations: usize,
    },
    #[error("flow state is unphysical: {0}")]
    UnphysicalState(String),
}

/// Calorically perfect gas: `gamma` and `R` are free, `c_p` is derived.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GasModel {
    pub gamma: f64,
    pub r: f64,
    pub cp: f64,
}

impl GasModel {
    pub fn new(gamma: f64, r: f64) -> Self {
        assert!(gamma > 1.0, "gamma must exceed 1");
        assert!(r > 0.0, "R must be positive");
        Self {
            gamma,
            r,
            cp: gamma * r / (gamma - 1.0),
        }
    }

    /// Standard air: gamma = 1.4, R = 287 J/(kg K).
    pub fn air() -> Self {
        Self::new(1.4, 287.0)
    }

    /// Speed of sound at static temperature `t`.
    pub fn sound_speed(&self, t: f64) -> f64 {
        (self.gamma * self.r * t).sqrt()
    }
}

impl Default for GasModel {
    fn default() -> Self {
        Self::air()
    }
}

/// Primitive description of one flow station or cell.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FlowState {
    /// Density, kg/m^3.
    pub rho: f64,
    /// Axial velocity, m/s.
    pub u: f64,
    /// Static pressure, Pa.
    pub p: f64,
    /// Static temperature, K.
    pub t: f64,
    /// Mach number.
    pub mach: f64,
}

impl FlowState {
    /// Build a consistent state from (rho, u, p); T and M follow from the gas.
    pub fn from_primitive(rho: f64, u: f64, p: f64, gas: &GasModel) -> Result<Self, GasError> {
        if rho <= 0.0 || p <= 0.0 {
            return Err(GasError::UnphysicalState(format!(
                "rho={rho}, p={p} (both must be positive)"
            )));
        }
        let t = p / (rho * gas.r);
        let mach = u / gas.sound_speed(t);
        Ok(Self { rho, u, p, t, mach })
    }

    /// Total (stagnation) temperature.
    pub fn total_temperature(&self, gas: &GasModel) -> f64 {
        self.t * (1.0 + 0.5 * (gas.gamma - 1.0) * self.mach * self.mach)
    }

    /// Total (stagnation) pressure. Uses |M|, valid for either flow direction.
    pub fn total_pressure(&self, gas: &GasModel) -> f64 {
        let g = gas.gamma;
        self.p * (1.0 + 0.5 * (g - 1.0) * self.mach * self.mach).powf(g / (g - 1.0))
    }
}

/// Isentropic flow-function ratios at a given Mach number.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IsentropicRatios {
    pub p_over_pt: f64,
    pub t_over_tt: f64,
    pub a_over_astar: f64,
}

/// Which side of the sonic point the area-Mach inversion should return.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Branch {
    Subsonic,
    Supersonic,
}

/// Pressure closure for the conservative energy variable:
/// p = (gamma - 1) rho (E - u^2/2).
///
/// A non-positive return signals an unphysical state; the solver rejects the
/// step rather than this function erroring.
pub fn close_pressure(rho: f64, total_energy: f64, u: f64, gas: &GasModel) -> f64 {
    debug_assert!(rho > 0.0);
    (gas.gamma - 1.0) * rho * (total_energy - 0.5 * u * u)
}

/// Standard isentropic relations T/Tt, p/pt and A/A* at Mach `m`.
pub fn isentropic_ratios(m: f64, gas: &GasModel) -> Result<IsentropicRatios, GasError> {
    if m <= 0.0 {
        return Err(GasError::NonPositiveMach(m));
    }
    let g = gas.gamma;
    let chi = 1.0 + 0.5 * (g - 1.0) * m * m;
    let t_over_tt = 1.0 / chi;
    let p_over_pt = chi.powf(-g / (g - 1.0));
    let a_over_astar =
        (2.0 / (g + 1.0) * chi).powf(0.5 * (g + 1.0) / (g - 1.0)) / m;
    Ok(IsentropicRatios {
        p_over_pt,
        t_over_tt,
        a_over_astar,
    })
}

/// Invert the area-Mach relation on the requested branch by bisection.
///
/// The subsonic bracket is (0, 1], the supersonic bracket [1, 50]; bisection
/// is retained over faster iterations because unconditional convergence
/// matters more than speed here.
pub fn mach_from_area_ratio(
    a_over_astar: f64,
    branch: Branch,
    gas: &GasModel,
) -> Result<f64, GasError> {
    if a_over_astar < 1.0 {
        return Err(GasError::AreaRatioBelowUnity(a_over_astar));
    }
    if a_over_astar == 1.0 {
        return Ok(1.0);
    }
    let area_ratio = |m: f64| isentropic_ratios(m, gas).map(|r| r.a_over_astar);
    let (mut lo, mut hi) = match branch {
        Branch::Subsonic => (1e-12, 1.0),
        Branch::Supersonic => (1.0, MACH_BRACKET_MAX),
    };
    // f is monotone on each branch: decreasing subsonic, increasing supersonic.
    let f = |m: f64| -> Result<f64, GasError> { Ok(area_ratio(m)? - a_over_astar) };
    if branch == Branch::Supersonic && f(hi)? < 0.0 {
        return Err(GasError::RootFindFailed {
            target: a_over_astar,
            branch,
            residual: f(hi)?,
            iterations: 0,
        });
    }
    let max_iterations = 200;
    for i in 0..max_iterations {
        let mid = 0.5 * (lo + hi);
        let fm = f(mid)?;
        if fm.abs() < 1e-12 || (hi - lo) < 1e-15 {
            return Ok(mid);
        }
        let downhill = match branch {
            Branch::Subsonic => fm > 0.0,
            Branch::Supersonic => fm < 0.0,
        };
        if downhill {
            lo = mid;
        } else {
            hi = mid;
        }
        if i + 1 == max_iterations {
            let mid = 0.5 * (lo + hi);
            let residual = f(mid)?;
            if residual.abs() < 1e-9 {
                return Ok(mid);
            }
            return Err(GasError::RootFindFailed {
                target: a_over_astar,
                branch,
                residual,
                iterations: max_iterations,
            });
        }
    }
    unreachable!()
}

/// Rayleigh-flow total-temperature ratio Tt/Tt* at Mach `m`.
///
/// Equals 1 at M = 1 and is strictly below 1 elsewhere; the reciprocal gives
/// how much total-temperature rise a constant-area frictionless flow can
/// absorb before thermally choking.
pub fn rayleigh_total_temperature_ratio(m: f64, gas: &GasModel) -> Result<f64, GasError> {
    if m <= 0.0 {
        return Err(GasError::NonPositiveMach(m));
    }
    let g = gas.gamma;
    let m2 = m * m;
    let num = (g + 1.0) * m2 * (2.0 + (g - 1.0) * m2);
    let den = (1.0 + g * m2) * (1.0 + g * m2);
    Ok(num / den)
}

/// Invert the Rayleigh Tt/Tt* relation on the requested branch by bisection.
pub fn rayleigh_mach_from_total_temperature_ratio(
    ratio: f64,
    branch: Branch,
    gas: &GasModel,
) -> Result<f64, GasError> {
    if !(0.0..=1.0).contains(&ratio) {
        return Err(GasError::UnphysicalState(format!(
            "Rayleigh Tt/Tt* must lie in (0, 1], got {ratio}"
        )));
    }
    let (mut lo, mut hi) = match branch {
        Branch::Subsonic => (1e-9, 1.0),
        Branch::Supersonic => (1.0, MACH_BRACKET_MAX),
    };
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        let f = rayleigh_total_temperature_ratio(mid, gas)? - ratio;
        if f.abs() < 1e-13 || (hi - lo) < 1e-15 {
            return Ok(mid);
        }
        // Tt/Tt* rises toward M = 1 from either side.
        let below_target = f < 0.0;
        match branch {
            Branch::Subsonic => {
                if below_target {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            Branch::Supersonic => {
                if below_target {
                    hi = mid;
                } else {
                    lo = mid;
                }
            }
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Rayleigh-flow total-pressure ratio pt/pt* at Mach `m`.
pub fn rayleigh_total_pressure_ratio(m: f64, gas: &GasModel) -> Result<f64, GasError> {
    if m <= 0.0 {
        return Err(GasError::NonPositiveMach(m));
    }
    let g = gas.gamma;
    let m2 = m * m;
    let ratio = (1.0 + g) / (1.0 + g * m2)
        * ((2.0 + (g - 1.0) * m2) / (g + 1.0)).powf(g / (g - 1.0));
    Ok(ratio)
}

/// Rayleigh-flow static-pressure ratio p/p* at Mach `m`.
pub fn rayleigh_static_pressure_ratio(m: f64, gas: &GasModel) -> Result<f64, GasError> {
    if m <= 0.0 {
        return Err(GasError::NonPositiveMach(m));
    }
    Ok((1.0 + gas.gamma) / (1.0 + gas.gamma * m * m))
}

/// Heat addition per unit mass flow that drives a constant-area frictionless
/// flow from `state` to the sonic condition: q* = cp Tt (1/(Tt/Tt*) - 1).
pub fn heat_to_choke(state: &FlowState, gas: &GasModel) -> Result<f64, GasError> {
    let tt = state.total_temperature(gas);
    let ratio = rayleigh_total_temperature_ratio(state.mach, gas)?;
    Ok(gas.cp * tt * (1.0 / ratio - 1.0))
}

/// Total-pressure ratio pt2/pt1 across a normal shock at Mach `m` >= 1.
pub fn normal_shock_total_pressure_ratio(m: f64, gas: &GasModel) -> Result<f64, GasError> {
    if m < 1.0 {
        return Err(GasError::UnphysicalState(format!(
            "normal shock requires M >= 1, got {m}"
        )));
    }
    let g = gas.gamma;
    let m2 = m * m;
    let a = ((g + 1.0) * m2 / ((g - 1.0) * m2 + 2.0)).powf(g / (g - 1.0));
    let b = ((g + 1.0) / (2.0 * g * m2 - (g - 1.0))).powf(1.0 / (g - 1.0));
    Ok(a * b)
}

/// State ratios across a normal shock at upstream Mach `m` >= 1.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NormalShockJump {
    pub downstream_mach: f64,
    pub pressure_ratio: f64,
    pub temperature_ratio: f64,
    pub density_ratio: f64,
}

pub fn normal_shock_jump(m: f64, gas: &GasModel) -> Result<NormalShockJump, GasError> {
    if m < 1.0 {
        return Err(GasError::UnphysicalState(format!(
            "normal shock requires M >= 1, got {m}"
        )));
    }
    let g = gas.gamma;
    let m2 = m * m;
    let downstream_mach = (((g - 1.0) * m2 + 2.0) / (2.0 * g * m2 - (g - 1.0))).sqrt();
    let pressure_ratio = 1.0 + 2.0 * g / (g + 1.0) * (m2 - 1.0);
    let density_ratio = (g + 1.0) * m2 / ((g - 1.0) * m2 + 2.0);
    Ok(NormalShockJump {
        downstream_mach,
        pressure_ratio,
        temperature_ratio: pressure_ratio / density_ratio,
        density_ratio,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::{assert_abs_diff_eq, assert_relative_eq};

    #[test]
    fn gas_model_cp_is_consistent() {
        let gas = GasModel::air();
        assert_relative_eq!(gas.cp, gas.gamma * gas.r / (gas.gamma - 1.0), epsilon = 1e-15);
        assert_relative_eq!(gas.cp, 1004.5, max_relative = 1e-12);
    }

    #[test]
    fn close_pressure_kinetic_equals_total() {
        let gas = GasModel::air();
        assert_abs_diff_eq!(close_pressure(1.0, 0.5, 1.0, &gas), 0.0, epsilon = 1e-14);
    }

    #[test]
    fn close_pressure_at_rest() {
        let gas = GasModel::air();
        // E = cv T for u = 0: 0.4 * 1.2 * 215250 = 103320 Pa
        assert_relative_eq!(close_pressure(1.2, 215_250.0, 0.0, &gas), 103_320.0, max_relative = 1e-12);
    }

    #[test]
    fn close_pressure_with_velocity() {
        let gas = GasModel::air();
        assert_relative_eq!(close_pressure(1.0, 2.5e5, 100.0, &gas), 98_000.0, max_relative = 1e-12);
    }

    #[test]
    fn close_pressure_energy_round_trip() {
        // Reconstruct E from p and recover p to machine precision.
        let gas = GasModel::air();
        for &(rho, u, p) in &[(1.16, 695.0, 1e5), (0.4, 150.0, 2.6e4), (2.0, -80.0, 3.2e5)] {
            let e = p / ((gas.gamma - 1.0) * rho) + 0.5 * u * u;
            assert_relative_eq!(close_pressure(rho, e, u, &gas), p, max_relative = 1e-12);
        }
    }

    #[test]
    fn isentropic_sonic_and_m2() {
        let gas = GasModel::air();
        let sonic = isentropic_ratios(1.0, &gas).unwrap();
        assert_relative_eq!(sonic.t_over_tt, 0.833333, max_relative = 1e-4);
        assert_relative_eq!(sonic.p_over_pt, 0.52828, max_relative = 1e-4);
        assert_relative_eq!(sonic.a_over_astar, 1.0, max_relative = 1e-12);

        let m2 = isentropic_ratios(2.0, &gas).unwrap();
        assert_relative_eq!(m2.p_over_pt, 0.12780, max_relative = 1e-4);
        assert_relative_eq!(m2.t_over_tt, 0.55556, max_relative = 1e-4);
        assert_relative_eq!(m2.a_over_astar, 1.68750, max_relative = 1e-4);
    }

    #[test]
    fn isentropic_low_mach_limit() {
        let gas = GasModel::air();
        let r = isentropic_ratios(1e-6, &gas).unwrap();
        assert_relative_eq!(r.p_over_pt, 1.0, max_relative = 1e-9);
        assert_relative_eq!(r.t_over_tt, 1.0, max_relative = 1e-9);
    }

    #[test]
    fn isentropic_rejects_nonpositive_mach() {
        let gas = GasModel::air();
        assert!(isentropic_ratios(0.0, &gas).is_err());
        assert!(isentropic_ratios(-1.0, &gas).is_err());
    }

    #[test]
    fn temperature_ratio_identity() {
        let gas = GasModel::air();
        let mut m = 0.05;
        while m <= 5.0 {
            let r = isentropic_ratios(m, &gas).unwrap();
            let chi = 1.0 + 0.5 * (gas.gamma - 1.0) * m * m;
            assert_abs_diff_eq!(r.t_over_tt * chi, 1.0, epsilon = 1e-12);
            m += 0.05;
        }
    }

    #[test]
    fn area_mach_inversion_examples() {
        let gas = GasModel::air();
        assert_relative_eq!(
            mach_from_area_ratio(1.0, Branch::Subsonic, &gas).unwrap(),
            1.0,
            max_relative = 1e-12
        );
        assert_relative_eq!(
            mach_from_area_ratio(1.68750, Branch::Supersonic, &gas).unwrap(),
            2.0,
            max_relative = 1e-3
        );
        let sub = mach_from_area_ratio(1.68750, Branch::Subsonic, &gas).unwrap();
        assert_relative_eq!(sub, 0.3722, max_relative = 1e-3);
        // Forward substitution closes the loop.
        let fwd = isentropic_ratios(sub, &gas).unwrap().a_over_astar;
        assert_relative_eq!(fwd, 1.68750, max_relative = 1e-9);
    }

    #[test]
    fn area_mach_round_trip_dense_grid() {
        let gas = GasModel::air();
        for i in 0..200 {
            let m = 0.05 + (5.0 - 0.05) * (i as f64) / 199.0;
            let a = isentropic_ratios(m, &gas).unwrap().a_over_astar;
            let branch = if m <= 1.0 { Branch::Subsonic } else { Branch::Supersonic };
            let back = mach_from_area_ratio(a, branch, &gas).unwrap();
            assert_abs_diff_eq!(back, m, epsilon = 1e-8);
        }
    }

    #[test]
    fn area_mach_rejects_bad_ratio() {
        let gas = GasModel::air();
        assert!(mach_from_area_ratio(0.99, Branch::Subsonic, &gas).is_err());
    }

    #[test]
    fn rayleigh_reference_values() {
        let gas = GasModel::air();
        assert_relative_eq!(rayleigh_total_temperature_ratio(1.0, &gas).unwrap(), 1.0, max_relative = 1e-12);
        assert_relative_eq!(rayleigh_total_temperature_ratio(0.5, &gas).unwrap(), 0.69136, max_relative = 1e-4);
        assert_relative_eq!(rayleigh_total_temperature_ratio(2.0, &gas).unwrap(), 0.79339, max_relative = 1e-4);
    }

    #[test]
    fn rayleigh_maximum_unique_at_sonic() {
        let gas = GasModel::air();
        let mut best_m = 0.0;
        let mut best = 0.0;
        for i in 1..=500 {
            let m = 0.02 * i as f64;
            let v = rayleigh_total_temperature_ratio(m, &gas).unwrap();
            assert!(v <= 1.0 + 1e-14);
            if v > best {
                best = v;
                best_m = m;
            }
        }
        assert_relative_eq!(best_m, 1.0, max_relative = 1e-9);
        assert!(rayleigh_total_temperature_ratio(0.999, &gas).unwrap() < 1.0);
        assert!(rayleigh_total_temperature_ratio(1.001, &gas).unwrap() < 1.0);
    }

    #[test]
    fn rayleigh_inverse_round_trip() {
        let gas = GasModel::air();
        for &m in &[0.1, 0.3, 0.5, 0.8, 0.95, 1.2, 2.0, 3.5] {
            let ratio = rayleigh_total_temperature_ratio(m, &gas).unwrap();
            let branch = if m < 1.0 { Branch::Subsonic } else { Branch::Supersonic };
            let back = rayleigh_mach_from_total_temperature_ratio(ratio, branch, &gas).unwrap();
            assert_relative_eq!(back, m, max_relative = 1e-9);
        }
    }

    #[test]
    fn heat_to_choke_examples() {
        let gas = GasModel::air();
        // Already sonic: no margin left.
        let sonic = FlowState::from_primitive(1.0, gas.sound_speed(300.0), 1.0 * gas.r * 300.0, &gas).unwrap();
        assert_abs_diff_eq!(heat_to_choke(&sonic, &gas).unwrap(), 0.0, epsilon = 1e-6);

        // M = 0.5 with Tt = 330 K: q* = cp * 330 * (1/0.69136 - 1) = 1.48e5 J/kg.
        let t = 330.0 / (1.0 + 0.2 * 0.25);
        let u = 0.5 * gas.sound_speed(t);
        let state = FlowState::from_primitive(1.0, u, gas.r * t, &gas).unwrap();
        assert_relative_eq!(heat_to_choke(&state, &gas).unwrap(), 1.48e5, max_relative = 2e-3);
    }

    #[test]
    fn heat_to_choke_monotone_in_mach_deficit() {
        let gas = GasModel::air();
        // Same Tt, farther from sonic needs more heat.
        let tt = 330.0;
        let q = |m: f64| {
            let t = tt / (1.0 + 0.2 * m * m);
            let state = FlowState::from_primitive(1.0, m * gas.sound_speed(t), gas.r * t, &gas).unwrap();
            heat_to_choke(&state, &gas).unwrap()
        };
        assert!(q(0.3) > q(0.5));
    }

    #[test]
    fn flow_state_identities() {
        let gas = GasModel::air();
        let s = FlowState::from_primitive(1.1614, 695.0, 1.0e5, &gas).unwrap();
        assert_relative_eq!(s.p, s.rho * gas.r * s.t, max_relative = 1e-10);
        assert_relative_eq!(s.mach, s.u / gas.sound_speed(s.t), max_relative = 1e-10);
        assert_relative_eq!(s.mach, 2.0, max_relative = 2e-3);
    }

    #[test]
    fn normal_shock_m2_recovery() {
        let gas = GasModel::air();
        // Tabulated pt2/pt1 at M = 2 is 0.72087.
        assert_relative_eq!(
            normal_shock_total_pressure_ratio(2.0, &gas).unwrap(),
            0.72087,
            max_relative = 1e-4
        );
    }

    mod properties {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn area_mach_round_trip(m in 0.05f64..5.0) {
                let gas = GasModel::air();
                let a = isentropic_ratios(m, &gas).unwrap().a_over_astar;
                let branch = if m <= 1.0 { Branch::Subsonic } else { Branch::Supersonic };
                let back = mach_from_area_ratio(a, branch, &gas).unwrap();
                prop_assert!((back - m).abs() < 1e-8);
            }

            #[test]
            fn ratios_bounded_for_any_gas(m in 0.01f64..8.0, gamma in 1.1f64..1.7) {
                let gas = GasModel::new(gamma, 287.0);
                let r = isentropic_ratios(m, &gas).unwrap();
                prop_assert!(r.p_over_pt > 0.0 && r.p_over_pt <= 1.0);
                prop_assert!(r.t_over_tt > 0.0 && r.t_over_tt <= 1.0);
                prop_assert!(r.a_over_astar >= 1.0 - 1e-12);
                let ray = rayleigh_total_temperature_ratio(m, &gas).unwrap();
                prop_assert!(ray > 0.0 && ray <= 1.0 + 1e-12);
            }

            #[test]
            fn closure_reconstructs_pressure(
                rho in 0.01f64..10.0,
                u in -1000.0f64..1000.0,
                p in 1.0e3f64..1.0e6,
            ) {
                let gas = GasModel::air();
                let e = p / ((gas.gamma - 1.0) * rho) + 0.5 * u * u;
                let back = close_pressure(rho, e, u, &gas);
                prop_assert!((back - p).abs() <= 1e-12 * p.max(0.5 * rho * u * u));
            }
        }
    }

    #[test]
    fn normal_shock_jump_m2() {
        // Tabulated normal-shock values at M = 2.
        let gas = GasModel::air();
        let j = normal_shock_jump(2.0, &gas).unwrap();
        assert_relative_eq!(j.downstream_mach, 0.57735, max_relative = 1e-4);
        assert_relative_eq!(j.pressure_ratio, 4.5, max_relative = 1e-12);
        assert_relative_eq!(j.density_ratio, 2.66667, max_relative = 1e-4);
        assert_relative_eq!(j.temperature_ratio, 1.6875, max_relative = 1e-4);
        // The jump conserves mass, momentum and energy fluxes.
        let (rho1, u1, p1) = (1.2, 2.0 * gas.sound_speed(300.0), 1.2 * gas.r * 300.0);
        let rho2 = rho1 * j.density_ratio;
        let u2 = u1 / j.density_ratio;
        let p2 = p1 * j.pressure_ratio;
        assert_relative_eq!(rho1 * u1, rho2 * u2, max_relative = 1e-12);
        assert_relative_eq!(p1 + rho1 * u1 * u1, p2 + rho2 * u2 * u2, max_relative = 1e-12);
        let h = |p: f64, rho: f64, u: f64| gas.cp * p / (gas.r * rho) + 0.5 * u * u;
        assert_relative_eq!(h(p1, rho1, u1), h(p2, rho2, u2), max_relative = 1e-12);
    }
}
