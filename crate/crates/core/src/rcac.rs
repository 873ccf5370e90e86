//! Adaptive PI controller in regressor form with gains optimized online by
//! retrospective cost optimization.
//!
//! The control law is u_k = Phi_k theta_k with regressor Phi_k = [z_k,
//! gamma_k] (output error and its running sum) and gain vector theta =
//! [K_P, K_I]. The gains minimize a retrospective cost built from filtered
//! past data through recursive least squares; the target model is the
//! one-step-delay filter G_f(q) = N1 q^-1. The update consumes only measured
//! data (z, Phi, u) and the two hyperparameters; no plant model appears
//! anywhere in the interface.

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum RcacError {
    #[error("covariance lost positive definiteness: min eigenvalue {0:.3e}")]
    CovarianceNotPositiveDefinite(f64),
}

/// RCAC hyperparameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RcacConfig {
    /// Initial covariance scale p: P0 = p I2.
    pub p0_scale: f64,
    /// Target-model coefficient.
    pub n1: f64,
    /// RLS forgetting factor.
    pub lambda: f64,
    /// Initial gains [K_P, K_I].
    pub theta0: [f64; 2],
    /// Optional pre-scaling applied to the output error before the
    /// controller sees it.
    pub error_scale: f64,
    /// Saturation bound on the control signal.
    pub u_max: f64,
}

impl Default for RcacConfig {
    fn default() -> Self {
        Self {
            p0_scale: 1e-6,
            n1: 1.0,
            lambda: 1.0,
            theta0: [0.0, 0.0],
            error_scale: 1.0,
            u_max: 10.0,
        }
    }
}

impl RcacConfig {
    pub fn validate(&self) -> Result<(), String> {
        if !(self.p0_scale > 0.0) {
            return Err(format!("p0_scale must be positive, got {}", self.p0_scale));
        }
        if self.n1 == 0.0 {
            return Err("n1 must be nonzero".into());
        }
        if !(self.lambda > 0.0 && self.lambda <= 1.0) {
            return Err(format!("lambda must lie in (0, 1], got {}", self.lambda));
        }
        Ok(())
    }
}

/// Affine map from the dimensionless control signal to the wall heat flux:
/// w = w_bar + K_w u, clamped to [0, w_max].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MapConfig {
    /// Nominal heat flux, W/m^2.
    pub w_bar: f64,
    /// Scaling factor, W/m^2 per unit control.
    pub k_w: f64,
    /// Heat-flux clamp.
    pub w_max: f64,
}

impl Default for MapConfig {
    fn default() -> Self {
        Self {
            w_bar: 10.0e6,
            k_w: 1.0e6,
            w_max: 16.0e6,
        }
    }
}

impl MapConfig {
    pub fn validate(&self) -> Result<(), String> {
        if !(self.w_bar > 0.0) || !(self.k_w > 0.0) {
            return Err("w_bar and k_w must be positive".into());
        }
        Ok(())
    }
}

/// Heat flux from the control signal.
pub fn heat_flux_map(u: f64, cfg: &MapConfig) -> f64 {
    (cfg.w_bar + cfg.k_w * u).clamp(0.0, cfg.w_max)
}

/// Controller output u = Phi theta.
pub fn controller_output(theta: &[f64; 2], phi: &[f64; 2]) -> f64 {
    phi[0] * theta[0] + phi[1] * theta[1]
}

/// Accumulate the output error into the integrator: gamma <- gamma + z.
pub fn accumulate_error(gamma: f64, z: f64) -> f64 {
    gamma + z
}

/// Controller state: gains, covariance, accumulator and the one-step history
/// the target-model filter needs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RcacState {
    pub theta: [f64; 2],
    /// Covariance matrix, row major.
    pub p: [[f64; 2]; 2],
    pub gamma_acc: f64,
    prev_phi: Option<[f64; 2]>,
    prev_u: f64,
    steps: u64,
}

impl RcacState {
    pub fn new(cfg: &RcacConfig) -> Self {
        Self {
            theta: cfg.theta0,
            p: [[cfg.p0_scale, 0.0], [0.0, cfg.p0_scale]],
            gamma_acc: 0.0,
            prev_phi: None,
            prev_u: 0.0,
            steps: 0,
        }
    }

    /// Smallest eigenvalue of the (symmetric) covariance.
    pub fn min_eigenvalue(&self) -> f64 {
        let (a, b, d) = (self.p[0][0], 0.5 * (self.p[0][1] + self.p[1][0]), self.p[1][1]);
        let mean = 0.5 * (a + d);
        let disc = (0.25 * (a - d) * (a - d) + b * b).sqrt();
        mean - disc
    }

    /// One retrospective-cost RLS step from the newest error measurement.
    ///
    /// With filtered regressor Phi_f = N1 Phi_{k-1} and filtered control
    /// u_f = N1 u_{k-1}, the retrospective error is
    /// z_hat(theta) = z_k + Phi_f theta - u_f, and (theta, P) take one
    /// forgetting-factor RLS step on z_hat^2. At the first step there is no
    /// stored history and theta is unchanged.
    pub fn update(&mut self, z: f64, cfg: &RcacConfig) -> Result<(), RcacError> {
        let Some(prev_phi) = self.prev_phi else {
            self.steps += 1;
            return Ok(());
        };
        let phi_f = [cfg.n1 * prev_phi[0], cfg.n1 * prev_phi[1]];
        let u_f = cfg.n1 * self.prev_u;
        let zhat = z + controller_output(&self.theta, &phi_f) - u_f;

        // P phi_f^T and the scalar denominator lambda + phi_f P phi_f^T.
        let p_phi = [
            self.p[0][0] * phi_f[0] + self.p[0][1] * phi_f[1],
            self.p[1][0] * phi_f[0] + self.p[1][1] * phi_f[1],
        ];
        let denom = cfg.lambda + phi_f[0] * p_phi[0] + phi_f[1] * p_phi[1];
        let gain = [p_phi[0] / denom, p_phi[1] / denom];

        self.theta[0] -= gain[0] * zhat;
        self.theta[1] -= gain[1] * zhat;

        let inv_lambda = 1.0 / cfg.lambda;
        for i in 0..2 {
            for j in 0..2 {
                self.p[i][j] = inv_lambda * (self.p[i][j] - gain[i] * p_phi[j]);
            }
        }
        // Symmetrize against rounding and verify positive definiteness.
        let off = 0.5 * (self.p[0][1] + self.p[1][0]);
        self.p[0][1] = off;
        self.p[1][0] = off;
        let min_eig = self.min_eigenvalue();
        if min_eig <= 0.0 {
            return Err(RcacError::CovarianceNotPositiveDefinite(min_eig));
        }
        self.steps += 1;
        Ok(())
    }

    /// Store the regressor / control pair actually applied this step; the
    /// next update filters through it.
    pub fn store_step(&mut self, phi: [f64; 2], u: f64) {
        self.prev_phi = Some(phi);
        self.prev_u = u;
    }

    pub fn steps(&self) -> u64 {
        self.steps
    }
}

/// One full controller step: measure z, accumulate, adapt, emit (u, w).
///
/// The integrator holds (is not accumulated) on steps where either the
/// control or the heat-flux clamp is active, and the stored history records
/// the clamped control actually applied.
pub fn controller_step(
    state: &mut RcacState,
    z_raw: f64,
    cfg: &RcacConfig,
    map: &MapConfig,
) -> Result<ControlDecision, RcacError> {
    let z = cfg.error_scale * z_raw;
    state.update(z, cfg)?;

    let gamma_candidate = accumulate_error(state.gamma_acc, z);
    let phi_candidate = [z, gamma_candidate];
    let u_raw = controller_output(&state.theta, &phi_candidate);
    let u_clamped = u_raw.clamp(-cfg.u_max, cfg.u_max);
    let w_raw = map.w_bar + map.k_w * u_clamped;
    let w = w_raw.clamp(0.0, map.w_max);
    let saturated = u_clamped != u_raw || w != w_raw;

    let (phi, u) = if saturated {
        // Anti-windup: freeze the integrator while saturated.
        let phi = [z, state.gamma_acc];
        let u = controller_output(&state.theta, &phi).clamp(-cfg.u_max, cfg.u_max);
        let w = (map.w_bar + map.k_w * u).clamp(0.0, map.w_max);
        state.store_step(phi, u);
        return Ok(ControlDecision {
            z,
            u,
            w,
            saturated: true,
            theta: state.theta,
        });
    } else {
        state.gamma_acc = gamma_candidate;
        (phi_candidate, u_clamped)
    };
    state.store_step(phi, u);
    Ok(ControlDecision {
        z,
        u,
        w,
        saturated,
        theta: state.theta,
    })
}

/// Outcome of one controller step.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ControlDecision {
    /// Error after pre-scaling.
    pub z: f64,
    pub u: f64,
    pub w: f64,
    pub saturated: bool,
    pub theta: [f64; 2],
}
