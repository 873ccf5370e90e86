//! Closed-loop experiment harness: couples the RCAC PI controller to an
//! engine backend and runs the regulation experiments (step command, random
//! commands, hyperparameter grid, Monte-Carlo robustness studies).

pub mod backend;
pub mod command;

pub use backend::{BackendError, EngineBackend, FullEngineBackend, LtiBackend, SurrogateBackend};
pub use command::CommandProfile;

use crate::engine::{BoundaryCondition, EngineGeometry, InletCondition, OutletMode, SolverConfig};
use crate::envelope::{EnvelopeTable, HeatFluxSweep};
use crate::gas::GasModel;
use crate::rcac::{controller_step, MapConfig, RcacConfig, RcacState};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ExperimentError {
    #[error("experiment aborted at control step {step}: {source}")]
    Aborted {
        step: u64,
        source: BackendError,
        partial: Box<ExperimentLog>,
    },
    #[error("controller failed at step {step}: {source}")]
    Controller {
        step: u64,
        source: crate::rcac::RcacError,
    },
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("feasibility resampling exceeded {0} attempts")]
    ResamplingExhausted(usize),
    #[error(transparent)]
    Backend(#[from] BackendError),
}

/// How thrust commands are interpreted.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CommandMode {
    /// Commands are used as given, in newtons.
    RawNewtons,
    /// Commands follow the benchmark scale and are mapped onto this engine's
    /// own pre-unstart thrust span (300..900 N onto 25%..75% of span).
    Calibrated,
}

/// Calibration derived from an open-loop sweep at nominal conditions: the
/// command mapping plus the heat-flux map recentred on this engine's span.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Calibration {
    /// Pre-unstart thrust span (min, max) over the started sweep prefix.
    pub thrust_span: (f64, f64),
    /// Flux where thrust crosses zero (interpolated).
    pub zero_thrust_flux: f64,
    /// Flux of the maximum started thrust.
    pub max_thrust_flux: f64,
    /// Recentred nominal heat flux: midway between the zero-thrust and
    /// max-thrust fluxes.
    pub w_bar: f64,
    /// Recentred scaling so the span maps to a control signal of order one.
    pub k_w: f64,
    /// Clamp at the last started flux.
    pub w_max: f64,
}

impl Calibration {
    /// Derive a calibration from a (started-prefix) heat-flux sweep.
    pub fn from_sweep(sweep: &HeatFluxSweep) -> Option<Self> {
        let pts: Vec<_> = sweep
            .started_prefix()
            .iter()
            .filter(|p| p.converged)
            .collect();
        if pts.len() < 3 {
            return None;
        }
        let (mut t_min, mut t_max) = (f64::INFINITY, f64::NEG_INFINITY);
        let mut max_flux = pts[0].flux;
        for p in &pts {
            t_min = t_min.min(p.thrust);
            if p.thrust > t_max {
                t_max = p.thrust;
                max_flux = p.flux;
            }
        }
        // Interpolate the zero-thrust flux; fall back to the first flux when
        // the whole span is positive.
        let mut zero_flux = pts[0].flux;
        for w in pts.windows(2) {
            let (a, b) = (w[0], w[1]);
            if a.thrust <= 0.0 && b.thrust > 0.0 {
                let t = -a.thrust / (b.thrust - a.thrust);
                zero_flux = a.flux + t * (b.flux - a.flux);
                break;
            }
        }
        let w_bar = 0.5 * (zero_flux + max_flux);
        let k_w = ((max_flux - zero_flux) / 12.0).max(1.0);
        Some(Self {
            thrust_span: (t_min, t_max),
            zero_thrust_flux: zero_flux,
            max_thrust_flux: max_flux,
            w_bar,
            k_w,
            w_max: max_flux,
        })
    }

    /// Map a benchmark-scale command (300..900 N band) onto 25%..75% of this
    /// engine's span.
    pub fn map_command(&self, benchmark_newtons: f64) -> f64 {
        let (lo, hi) = self.thrust_span;
        let width = hi - lo;
        let fraction = 0.25 + 0.5 * (benchmark_newtons - 300.0) / 600.0;
        lo + fraction * width
    }

    /// Thrust at a fraction of the span (0.5 = mid-envelope).
    pub fn span_fraction(&self, fraction: f64) -> f64 {
        let (lo, hi) = self.thrust_span;
        lo + fraction * (hi - lo)
    }

    /// Heat-flux map recentred on this calibration.
    pub fn map_config(&self) -> MapConfig {
        MapConfig {
            w_bar: self.w_bar,
            k_w: self.k_w,
            w_max: self.w_max,
        }
    }
}

/// Closed-loop configuration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LoopConfig {
    /// Solver iterations per control step (quasi-steady coupling).
    pub inner_iterations: u64,
    pub control_steps: u64,
    pub rcac: RcacConfig,
    pub map: MapConfig,
    /// Settle the engine at the nominal flux before closing the loop.
    pub settle_first: bool,
    pub command_mode: CommandMode,
}

impl Default for LoopConfig {
    fn default() -> Self {
        Self {
            inner_iterations: 500,
            control_steps: 275,
            rcac: RcacConfig {
                // Error pre-scaling keeps the closed-loop hyperparameter
                // grid in the adaptation-limited regime where settling time
                // decreases and overshoot grows with the covariance scale.
                error_scale: 0.03,
                ..RcacConfig::default()
            },
            map: MapConfig::default(),
            settle_first: true,
            command_mode: CommandMode::RawNewtons,
        }
    }
}

/// One logged control step.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LogStep {
    pub k: u64,
    pub r: f64,
    pub y: f64,
    /// Output error r - y.
    pub z: f64,
    pub u: f64,
    pub w: f64,
    pub k_p: f64,
    pub k_i: f64,
    pub unstarted: bool,
    pub residual: f64,
}

/// Complete, gap-free record of one closed-loop experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentLog {
    pub steps: Vec<LogStep>,
    pub seed: u64,
    pub command_mode: CommandMode,
    pub final_theta: [f64; 2],
}

impl ExperimentLog {
    /// First step index after which |z|/|r| stays below `band` for
    /// `consecutive` steps.
    pub fn settling_step(&self, band: f64, consecutive: usize) -> Option<usize> {
        let n = self.steps.len();
        if n < consecutive {
            return None;
        }
        'outer: for k in 0..=(n - consecutive) {
            for s in &self.steps[k..k + consecutive] {
                if s.z.abs() > band * s.r.abs().max(1e-12) {
                    continue 'outer;
                }
            }
            return Some(k);
        }
        None
    }

    /// Peak overshoot: the largest excursion of y past the command in the
    /// direction of the initial approach, as a fraction of the command.
    pub fn peak_overshoot(&self) -> f64 {
        let Some(first) = self.steps.first() else {
            return 0.0;
        };
        let approach = (first.r - first.y).signum();
        self.steps
            .iter()
            .map(|s| approach * (s.y - s.r) / s.r.abs().max(1e-12))
            .fold(0.0, f64::max)
    }

    /// Final relative error |z|/|r|.
    pub fn final_relative_error(&self) -> f64 {
        self.steps
            .last()
            .map(|s| s.z.abs() / s.r.abs().max(1e-12))
            .unwrap_or(f64::INFINITY)
    }

    /// CSV export: k, r, y, z, u, w, K_P, K_I, unstarted, residual.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("k,r,y,z,u,w,K_P,K_I,unstarted,residual\n");
        for s in &self.steps {
            out.push_str(&format!(
                "{},{},{},{},{},{},{},{},{},{}\n",
                s.k, s.r, s.y, s.z, s.u, s.w, s.k_p, s.k_i, s.unstarted, s.residual
            ));
        }
        out
    }
}

/// RNG stream for experiment `index` under a base seed. ChaCha streams keep
/// parallel experiments independent and replayable.
pub fn experiment_rng(base_seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(base_seed);
    rng.set_stream(index);
    rng
}

/// Run one closed-loop regulation experiment.
///
/// Per control step: read thrust, form the output error, adapt the gains,
/// emit (u, w), apply w to the backend for `inner_iterations`. Unstart sets
/// the log flag but does not abort; backend divergence aborts with the
/// partial log attached.
pub fn regulate<B: EngineBackend>(
    backend: &mut B,
    profile: &CommandProfile,
    cfg: &LoopConfig,
    seed: u64,
) -> Result<ExperimentLog, ExperimentError> {
    cfg.rcac
        .validate()
        .map_err(ExperimentError::InvalidConfig)?;
    cfg.map.validate().map_err(ExperimentError::InvalidConfig)?;
    if cfg.inner_iterations == 0 || cfg.control_steps == 0 {
        return Err(ExperimentError::InvalidConfig(
            "inner_iterations and control_steps must be at least 1".into(),
        ));
    }

    let mut rng = experiment_rng(seed, 0);
    let commands = profile.trace(cfg.control_steps, &mut rng);

    if cfg.settle_first {
        backend.settle(cfg.map.w_bar)?;
    }
    let mut state = RcacState::new(&cfg.rcac);
    let mut steps: Vec<LogStep> = Vec::with_capacity(commands.len());

    for (k, &r) in commands.iter().enumerate() {
        let y = backend.thrust();
        let z = r - y;
        // The retrospective cost construction regulates the loop error with
        // the sign convention of the control architecture block diagram
        // (feedback minus reference); the log keeps z = r - y.
        let decision = controller_step(&mut state, y - r, &cfg.rcac, &cfg.map)
            .map_err(|source| ExperimentError::Controller { step: k as u64, source })?;
        let unstarted = backend.unstarted();
        steps.push(LogStep {
            k: k as u64,
            r,
            y,
            z,
            u: decision.u,
            w: decision.w,
            k_p: decision.theta[0],
            k_i: decision.theta[1],
            unstarted,
            residual: backend.residual(),
        });
        if let Err(source) = backend.advance(decision.w, cfg.inner_iterations) {
            return Err(ExperimentError::Aborted {
                step: k as u64,
                source,
                partial: Box::new(ExperimentLog {
                    steps,
                    seed,
                    command_mode: cfg.command_mode,
                    final_theta: state.theta,
                }),
            });
        }
    }

    Ok(ExperimentLog {
        steps,
        seed,
        command_mode: cfg.command_mode,
        final_theta: state.theta,
    })
}

/// One cell of the hyperparameter grid.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SweepCell {
    pub n1: f64,
    pub p0_scale: f64,
    /// Settling step into the sustained 2% band, None when never settled.
    pub settling: Option<usize>,
    pub overshoot: f64,
    pub failed: bool,
    pub log: Option<ExperimentLog>,
}

/// Run the (N1, P0) grid on identical commands and seeds. Cells run in
/// parallel; a failing cell is recorded and the sweep continues.
pub fn hyperparameter_sweep<B, F>(
    n_values: &[f64],
    p_values: &[f64],
    profile: &CommandProfile,
    base: &LoopConfig,
    seed: u64,
    make_backend: F,
) -> Vec<SweepCell>
where
    B: EngineBackend,
    F: Fn() -> B + Sync,
{
    assert!(!n_values.is_empty() && !p_values.is_empty());
    let cells: Vec<(f64, f64)> = n_values
        .iter()
        .flat_map(|&n| p_values.iter().map(move |&p| (n, p)))
        .collect();
    cells
        .par_iter()
        .map(|&(n1, p0_scale)| {
            let mut cfg = base.clone();
            cfg.rcac.n1 = n1;
            cfg.rcac.p0_scale = p0_scale;
            let mut backend = make_backend();
            match regulate(&mut backend, profile, &cfg, seed) {
                Ok(log) => SweepCell {
                    n1,
                    p0_scale,
                    settling: log.settling_step(0.02, 10),
                    overshoot: log.peak_overshoot(),
                    failed: false,
                    log: Some(log),
                },
                Err(_) => SweepCell {
                    n1,
                    p0_scale,
                    settling: None,
                    overshoot: f64::INFINITY,
                    failed: true,
                    log: None,
                },
            }
        })
        .collect()
}

/// Inlet sampling ranges for the robustness study.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InletRanges {
    pub velocity: (f64, f64),
    pub temperature: (f64, f64),
    pub pressure: (f64, f64),
}

impl InletRanges {
    /// The benchmark ranges: 800-1000 m/s, 220-260 K, 26-54 kPa.
    pub fn benchmark() -> Self {
        Self {
            velocity: (800.0, 1000.0),
            temperature: (220.0, 260.0),
            pressure: (26_000.0, 54_000.0),
        }
    }

    fn sample(&self, rng: &mut ChaCha8Rng) -> InletCondition {
        InletCondition {
            velocity: rng.random_range(self.velocity.0..=self.velocity.1),
            temperature: rng.random_range(self.temperature.0..=self.temperature.1),
            pressure: rng.random_range(self.pressure.0..=self.pressure.1),
        }
    }
}

/// Result of one Monte-Carlo sample.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MonteCarloRun {
    pub sample_index: u64,
    pub inlet: InletCondition,
    /// Sampled altitude for flight-envelope sampling; None when the inlet
    /// state was sampled directly.
    pub altitude: Option<f64>,
    pub command: f64,
    pub rejections: u64,
    pub final_relative_error: f64,
    pub converged_theta: [f64; 2],
    pub log: ExperimentLog,
}

/// Monte-Carlo inlet robustness: sample (velocity, temperature, pressure)
/// uniformly, reject samples whose command exceeds that inlet's achievable
/// thrust (probed by a steady solve at the map's flux ceiling), and regulate
/// each accepted sample at the commanded thrust.
#[allow(clippy::too_many_arguments)]
pub fn monte_carlo_inlet(
    n_samples: u64,
    ranges: InletRanges,
    command: f64,
    seed: u64,
    geometry: &EngineGeometry,
    solver_config: SolverConfig,
    gas: GasModel,
    cfg: &LoopConfig,
) -> Result<Vec<MonteCarloRun>, ExperimentError> {
    let runs: Result<Vec<MonteCarloRun>, ExperimentError> = (0..n_samples)
        .into_par_iter()
        .map(|i| {
            // Each sample owns an RNG stream, so rejection histories replay
            // identically regardless of thread scheduling.
            let mut rng = experiment_rng(seed, i + 1);
            let mut rejections = 0u64;
            let inlet = loop {
                let candidate = ranges.sample(&mut rng);
                if probe_feasible(geometry, candidate, solver_config, gas, cfg, command) {
                    break candidate;
                }
                rejections += 1;
                if rejections > 1000 {
                    return Err(ExperimentError::ResamplingExhausted(1000));
                }
            };
            let bc = BoundaryCondition::new(
                inlet,
                OutletMode::Auto {
                    back_pressure: inlet.pressure,
                },
                &gas,
            );
            let mut backend = FullEngineBackend::new(geometry.clone(), bc, solver_config, gas);
            let profile = CommandProfile::Constant { value: command };
            let log = regulate(&mut backend, &profile, cfg, seed.wrapping_add(i))?;
            Ok(MonteCarloRun {
                altitude: None,
                sample_index: i,
                inlet,
                command,
                rejections,
                final_relative_error: log.final_relative_error(),
                converged_theta: log.final_theta,
                log,
            })
        })
        .collect();
    let mut runs = runs?;
    runs.sort_by_key(|r| r.sample_index);
    Ok(runs)
}

/// Feasibility probe for a sampled inlet: steady solve at the actuator flux
/// ceiling; the command is feasible when that run stays started and reaches
/// at least the commanded thrust.
fn probe_feasible(
    geometry: &EngineGeometry,
    inlet: InletCondition,
    solver_config: SolverConfig,
    gas: GasModel,
    cfg: &LoopConfig,
    command: f64,
) -> bool {
    let bc = BoundaryCondition::new(
        inlet,
        OutletMode::Auto {
            back_pressure: inlet.pressure,
        },
        &gas,
    );
    let mut solver = crate::engine::EngineSolver::new(geometry.clone(), bc, solver_config, gas);
    match solver.run_to_steady(cfg.map.w_max) {
        Ok(r) => !r.unstarted() && r.thrust >= command,
        Err(_) => false,
    }
}

/// Monte-Carlo over flight conditions: sample (altitude, velocity) and a
/// candidate thrust, resampling the thrust against the envelope table until
/// feasible, then regulate on the full engine at that flight condition.
#[allow(clippy::too_many_arguments)]
pub fn monte_carlo_envelope(
    n_samples: u64,
    altitude_range: (f64, f64),
    velocity_range: (f64, f64),
    thrust_range: (f64, f64),
    seed: u64,
    table: &EnvelopeTable,
    geometry: &EngineGeometry,
    solver_config: SolverConfig,
    gas: GasModel,
    cfg: &LoopConfig,
) -> Result<Vec<MonteCarloRun>, ExperimentError> {
    let mut picks: Vec<(u64, f64, f64, f64, u64)> = Vec::new();
    for i in 0..n_samples {
        let mut rng = experiment_rng(seed, i + 1);
        let altitude = rng.random_range(altitude_range.0..=altitude_range.1);
        let velocity = rng.random_range(velocity_range.0..=velocity_range.1);
        let mut rejections = 0u64;
        let command = loop {
            let candidate = rng.random_range(thrust_range.0..=thrust_range.1);
            match table.query_feasible(altitude, velocity, candidate) {
                Ok(f) if f.feasible => break candidate,
                _ => {
                    rejections += 1;
                    if rejections > 1000 {
                        return Err(ExperimentError::ResamplingExhausted(1000));
                    }
                }
            }
        };
        picks.push((i, altitude, velocity, command, rejections));
    }

    let runs: Result<Vec<MonteCarloRun>, ExperimentError> = picks
        .par_iter()
        .map(|&(i, altitude, velocity, command, rejections)| {
            let inlet = crate::envelope::flight_inlet(altitude, velocity)
                .map_err(|e| ExperimentError::InvalidConfig(e.to_string()))?;
            let bc = BoundaryCondition::new(
                inlet,
                OutletMode::Auto {
                    back_pressure: inlet.pressure,
                },
                &gas,
            );
            let mut backend = FullEngineBackend::new(geometry.clone(), bc, solver_config, gas);
            let profile = CommandProfile::Constant { value: command };
            let log = regulate(&mut backend, &profile, cfg, seed.wrapping_add(i))?;
            Ok(MonteCarloRun {
                altitude: Some(altitude),
                sample_index: i,
                inlet,
                command,
                rejections,
                final_relative_error: log.final_relative_error(),
                converged_theta: log.final_theta,
                log,
            })
        })
        .collect();
    let mut runs = runs?;
    runs.sort_by_key(|r| r.sample_index);
    Ok(runs)
}
