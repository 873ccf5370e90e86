//! Engagement-level checks: kinematic log consistency and agreement between
//! the surrogate-table and full-solver engine backends.

use sfrj_core::atmosphere::isa;
use sfrj_core::engagement::*;
use sfrj_core::engine::{BoundaryCondition, OutletMode, SolverConfig};
use sfrj_core::envelope::flight_inlet;
use sfrj_core::gas::GasModel;
use sfrj_core::harness::{FullEngineBackend, SurrogateBackend};
use std::sync::OnceLock;

fn solver_config() -> SolverConfig {
    SolverConfig {
        n_cells: 250,
        max_iterations: 50_000,
        ..SolverConfig::default()
    }
}

fn engine() -> &'static EngagementEngine {
    static ENGINE: OnceLock<EngagementEngine> = OnceLock::new();
    ENGINE.get_or_init(|| {
        prepare_engine(
            &EngagementConfig::default(),
            solver_config(),
            GasModel::air(),
            &[6_500.0, 7_500.0, 8_500.0],
            &[700.0, 750.0, 800.0, 850.0, 900.0],
            &(1..=10).map(|i| 4.0e6 * i as f64).collect::<Vec<_>>(),
        )
        .unwrap()
    })
}

#[test]
fn logged_geometry_matches_position_traces() {
    let cfg = EngagementConfig {
        timeout: 1.5,
        ..EngagementConfig::default()
    };
    let gas = GasModel::air();
    let atmo = isa(cfg.pursuer_altitude).unwrap();
    let v0 = cfg.pursuer_mach * gas.sound_speed(atmo.t);
    let engine = engine();
    let mut backend = SurrogateBackend::new(engine.table.clone(), cfg.pursuer_altitude, v0);
    let log = run_engagement(&cfg, &mut backend, &engine.map).unwrap();
    for r in &log.rows {
        let los = line_of_sight(&r.pursuer, &r.evader);
        assert!((los.range - r.range).abs() < 1e-9);
        assert!((los.beta - r.beta).abs() < 1e-9);
    }
}

#[test]
fn surrogate_table_matches_full_solves_within_interpolation_error() {
    // The surrogate's steady map against fresh full solves at off-node
    // points: this bounds the table's interpolation error directly.
    let gas = GasModel::air();
    let engine = engine();
    let mut worst = 0.0_f64;
    for &(alt, vel, flux) in &[
        (7_000.0, 780.0, 14.0e6),
        (7_400.0, 750.0, 18.0e6),
        (6_800.0, 820.0, 10.0e6),
    ] {
        let interpolated = engine.table.thrust(alt, vel, flux).unwrap();
        let inlet = flight_inlet(alt, vel).unwrap();
        let bc = BoundaryCondition::new(
            inlet,
            OutletMode::Auto {
                back_pressure: inlet.pressure,
            },
            &gas,
        );
        let mut solver = sfrj_core::engine::EngineSolver::new(
            engine.geometry.clone(),
            bc,
            solver_config(),
            gas,
        );
        let direct = solver.run_to_steady(flux).unwrap();
        assert!(direct.converged && !direct.unstarted());
        let dev = (interpolated - direct.thrust).abs();
        println!(
            "({alt}, {vel}, {:.0e}): table {interpolated:.0} N vs direct {:.0} N (dev {dev:.0} N)",
            flux, direct.thrust
        );
        // Judge against the command scale the control loop operates on.
        worst = worst.max(dev / 12_000.0);
    }
    assert!(
        worst < 0.05,
        "table interpolation error {:.2}% of the thrust command exceeds the bound",
        100.0 * worst
    );
}

#[test]
fn surrogate_and_full_backends_agree_after_the_transient() {
    // Slowly varying flight conditions: once both loops have adapted, the
    // interpolated-table engine and the solver-in-the-loop engine must tell
    // the same regulated-thrust story within the interpolation error bound.
    let cfg = EngagementConfig {
        timeout: 1.5,
        ..EngagementConfig::default()
    };
    let gas = GasModel::air();
    let atmo = isa(cfg.pursuer_altitude).unwrap();
    let v0 = cfg.pursuer_mach * gas.sound_speed(atmo.t);
    let engine = engine();

    let mut surrogate = SurrogateBackend::new(engine.table.clone(), cfg.pursuer_altitude, v0);
    let log_s = run_engagement(&cfg, &mut surrogate, &engine.map).unwrap();

    let inlet = flight_inlet(cfg.pursuer_altitude, v0).unwrap();
    let bc = BoundaryCondition::new(
        inlet,
        OutletMode::Auto {
            back_pressure: inlet.pressure,
        },
        &gas,
    );
    let mut full = FullEngineBackend::new(engine.geometry.clone(), bc, solver_config(), gas);
    let log_f = run_engagement(&cfg, &mut full, &engine.map).unwrap();

    let n = log_s.rows.len().min(log_f.rows.len());
    let skip = n / 3;
    let mut worst = 0.0_f64;
    for i in skip..n {
        let dev = (log_s.rows[i].tau - log_f.rows[i].tau).abs() / cfg.thrust_command;
        worst = worst.max(dev);
    }
    assert!(
        worst < 0.05,
        "backends disagree by {:.1}% of the command after the transient",
        100.0 * worst
    );
}

#[test]
fn gains_evolve_during_flight() {
    let cfg = EngagementConfig {
        timeout: 3.0,
        ..EngagementConfig::default()
    };
    let gas = GasModel::air();
    let atmo = isa(cfg.pursuer_altitude).unwrap();
    let v0 = cfg.pursuer_mach * gas.sound_speed(atmo.t);
    let engine = engine();
    let mut backend = SurrogateBackend::new(engine.table.clone(), cfg.pursuer_altitude, v0);
    let log = run_engagement(&cfg, &mut backend, &engine.map).unwrap();
    let first = &log.rows[0];
    let last = log.rows.last().unwrap();
    assert!(
        (last.k_p - first.k_p).abs() + (last.k_i - first.k_i).abs() > 0.0,
        "controller gains must evolve with the changing inlet conditions"
    );
}
