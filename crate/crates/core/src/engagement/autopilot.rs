//! Three-loop pitch autopilot: acceleration-error integral outer loop, rate
//! feedback inner loop, fin deflection from the rate error.

use super::dynamics::ShortPeriodModel;
use serde::{Deserialize, Serialize};

pub const DELTA_LIMIT: f64 = 30.0_f64 * std::f64::consts::PI / 180.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AutopilotGains {
    /// Rate-loop gain: delta = k_r (omega_c - omega).
    pub k_r: f64,
    /// Outer-loop gain from the (integral + proportional) acceleration
    /// error to the rate command.
    pub k_omega: f64,
    /// Proportional weighting of the acceleration error, s.
    pub t_a: f64,
}

/// Autopilot with one integrator state.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Autopilot {
    pub gains: AutopilotGains,
    integral: f64,
}

impl Autopilot {
    pub fn new(gains: AutopilotGains) -> Self {
        Self {
            gains,
            integral: 0.0,
        }
    }

    /// Fin deflection from the acceleration command/measurement pair and the
    /// pitch rate; advances the internal integrator by `dt`.
    pub fn update(&mut self, a_zc: f64, a_z: f64, omega: f64, dt: f64) -> f64 {
        let error = a_zc - a_z;
        let omega_c = self.gains.k_omega * (self.integral + self.gains.t_a * error);
        let delta = (self.gains.k_r * (omega_c - omega)).clamp(-DELTA_LIMIT, DELTA_LIMIT);
        // Integrator holds while the fin is saturated.
        if delta.abs() < DELTA_LIMIT {
            self.integral += error * dt;
        }
        delta
    }

    pub fn reset(&mut self) {
        self.integral = 0.0;
    }
}

/// Simulate the linear short-period closed loop for a step acceleration
/// command; returns the a_z trace.
pub fn linear_step_response(
    sp: &ShortPeriodModel,
    gains: &AutopilotGains,
    a_zc: f64,
    dt: f64,
    n_steps: usize,
) -> Vec<f64> {
    let mut alpha = 0.0_f64;
    let mut omega = 0.0_f64;
    let mut autopilot = Autopilot::new(*gains);
    let mut out = Vec::with_capacity(n_steps);
    for _ in 0..n_steps {
        let a_z = sp.a_alpha * alpha;
        let delta = autopilot.update(a_zc, a_z, omega, dt);
        // Forward Euler on the two-state model at a fine step.
        let alpha_dot = sp.z_alpha * alpha + omega + sp.z_delta * delta;
        let omega_dot = sp.m_alpha * alpha + sp.m_q * omega + sp.m_delta * delta;
        alpha += dt * alpha_dot;
        omega += dt * omega_dot;
        out.push(a_z);
    }
    out
}

/// Select gains by direct search on the linearized short-period model at the
/// initial flight condition: minimize settling of the linear step response
/// with an overshoot penalty. Gains are frozen for the whole engagement.
pub fn design_gains(sp: &ShortPeriodModel) -> AutopilotGains {
    let dt = 5e-4;
    let n = 8_000; // 4 s of linear response
    let a_zc = 50.0;
    let score = |g: &AutopilotGains| -> f64 {
        let trace = linear_step_response(sp, g, a_zc, dt, n);
        let mut settled_at = n;
        for k in (0..n).rev() {
            if (trace[k] - a_zc).abs() > 0.05 * a_zc {
                settled_at = k + 1;
                break;
            }
        }
        if settled_at >= n {
            return f64::INFINITY;
        }
        let overshoot = trace
            .iter()
            .map(|&a| (a - a_zc).max(0.0))
            .fold(0.0, f64::max)
            / a_zc;
        settled_at as f64 * dt + 2.0 * overshoot
    };

    let mut best = AutopilotGains {
        k_r: 0.1,
        k_omega: 1.0,
        t_a: 0.1,
    };
    let mut best_score = f64::INFINITY;
    for &k_r in &[0.02, 0.05, 0.1, 0.2, 0.5] {
        for &k_omega in &[0.2, 0.5, 1.0, 2.0, 5.0] {
            for &t_a in &[0.05, 0.1, 0.2, 0.5] {
                let g = AutopilotGains { k_r, k_omega, t_a };
                let s = score(&g);
                if s < best_score {
                    best_score = s;
                    best = g;
                }
            }
        }
    }
    // One refinement pass around the coarse optimum.
    let coarse = best;
    for &fr in &[0.5, 0.75, 1.0, 1.5, 2.0] {
        for &fo in &[0.5, 0.75, 1.0, 1.5, 2.0] {
            for &ft in &[0.5, 1.0, 2.0] {
                let g = AutopilotGains {
                    k_r: coarse.k_r * fr,
                    k_omega: coarse.k_omega * fo,
                    t_a: coarse.t_a * ft,
                };
                let s = score(&g);
                if s < best_score {
                    best_score = s;
                    best = g;
                }
            }
        }
    }
    assert!(
        best_score.is_finite(),
        "no stabilizing gains found on the linearized model"
    );
    best
}
