//! `sfrj sweep`: the hyperparameter grid (N1 x P0).

use super::{get_calibration, load_config, parse_list, Context};
use crate::manifest::write_manifest;
use crate::CmdError;
use clap::Args as ClapArgs;
use serde::{Deserialize, Serialize};
use sfrj_core::engine::{BoundaryCondition, EngineGeometry, GeometryConfig, SolverConfig};
use sfrj_core::gas::GasModel;
use sfrj_core::harness::{
    hyperparameter_sweep, CommandMode, CommandProfile, FullEngineBackend, LoopConfig, LtiBackend,
};
use std::time::Instant;

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct Config {
    pub geometry: GeometryConfig,
    pub solver: SolverConfig,
    pub loop_config: LoopConfig,
}

impl Default for Config {
    fn default() -> Self {
        Self {
            geometry: GeometryConfig::default(),
            solver: SolverConfig::default(),
            loop_config: LoopConfig {
                control_steps: 200,
                ..LoopConfig::default()
            },
        }
    }
}

#[derive(Debug, ClapArgs)]
pub struct Args {
    /// Target-model coefficients.
    #[arg(long, default_value = "0.1,1,10")]
    n: String,
    /// Covariance scales.
    #[arg(long, default_value = "1e-5,1e-6,1e-7,1e-8")]
    p: String,
    /// Run on the linear surrogate plant instead of the engine.
    #[arg(long)]
    surrogate: bool,
    #[arg(long)]
    cells: Option<usize>,
    /// Fail (exit 5) if the grid orderings are violated.
    #[arg(long)]
    gate: bool,
    #[arg(long)]
    config: Option<std::path::PathBuf>,
}

/// Check the grid orderings at fixed N1: settling non-increasing and
/// overshoot non-decreasing as p grows. `cells` must be ordered with p
/// descending within each N1 block (as produced by the sweep).
pub fn orderings_hold(cells: &[sfrj_core::harness::SweepCell], p_len: usize) -> bool {
    for block in cells.chunks(p_len) {
        for pair in block.windows(2) {
            // Larger p first: settling must not exceed the next (smaller p).
            let s0 = pair[0].settling.map(|s| s as f64).unwrap_or(f64::INFINITY);
            let s1 = pair[1].settling.map(|s| s as f64).unwrap_or(f64::INFINITY);
            if s0 > s1 {
                return false;
            }
            if pair[0].overshoot < pair[1].overshoot {
                return false;
            }
        }
    }
    true
}

pub fn run(ctx: &Context, args: Args) -> Result<(), CmdError> {
    let mut config: Config = load_config(args.config.as_deref())?;
    if let Some(v) = args.cells {
        config.solver.n_cells = v;
    }
    let n_values = parse_list(&args.n)?;
    let mut p_values = parse_list(&args.p)?;
    // Order p descending so each block scans from aggressive to gentle.
    p_values.sort_by(|a, b| b.partial_cmp(a).unwrap());

    let gas = GasModel::air();
    let geometry = EngineGeometry::build(config.geometry)
        .map_err(|e| CmdError::Config(e.to_string()))?;
    let started = Instant::now();

    let cells = if args.surrogate {
        let profile = CommandProfile::Constant { value: 750.0 };
        hyperparameter_sweep(
            &n_values,
            &p_values,
            &profile,
            &config.loop_config,
            ctx.seed,
            LtiBackend::engine_like,
        )
    } else {
        let cal = get_calibration(ctx, &geometry, config.solver, gas)?;
        config.loop_config.map = cal.map_config();
        config.loop_config.command_mode = CommandMode::Calibrated;
        let profile = CommandProfile::Constant {
            value: cal.span_fraction(0.5),
        };
        let bc = BoundaryCondition::nominal(&gas);
        hyperparameter_sweep(
            &n_values,
            &p_values,
            &profile,
            &config.loop_config,
            ctx.seed,
            || FullEngineBackend::new(geometry.clone(), bc, config.solver, gas),
        )
    };

    let dir = ctx.out.join("sweep");
    std::fs::create_dir_all(&dir).map_err(|e| CmdError::Solver(e.to_string()))?;
    let mut report = String::from("n1,p0,settling,overshoot,failed\n");
    for c in &cells {
        println!(
            "n1 = {:>5}  p0 = {:>7.0e}  settling = {:>10}  overshoot = {:.4}  failed = {}",
            c.n1,
            c.p0_scale,
            c.settling.map_or("never".into(), |s| s.to_string()),
            c.overshoot,
            c.failed
        );
        report.push_str(&format!(
            "{},{},{},{},{}\n",
            c.n1,
            c.p0_scale,
            c.settling.map_or(-1i64, |s| s as i64),
            c.overshoot,
            c.failed
        ));
        if let Some(log) = &c.log {
            std::fs::write(
                dir.join(format!("log_n{}_p{:.0e}.csv", c.n1, c.p0_scale)),
                log.to_csv(),
            )
            .map_err(|e| CmdError::Solver(e.to_string()))?;
        }
    }
    std::fs::write(dir.join("grid.csv"), report).map_err(|e| CmdError::Solver(e.to_string()))?;

    let ok = orderings_hold(&cells, p_values.len());
    println!(
        "orderings (settling non-increasing, overshoot non-decreasing in p): {}",
        if ok { "hold" } else { "VIOLATED" }
    );
    write_manifest(
        &dir.join("manifest.json"),
        "sweep",
        ctx.seed,
        &config,
        started.elapsed().as_secs_f64(),
        serde_json::json!({
            "cells": cells.len(),
            "orderings_hold": ok,
            "surrogate": args.surrogate,
        }),
    )
    .map_err(|e| CmdError::Solver(e.to_string()))?;
    if args.gate && !ok {
        return Err(CmdError::Gate("hyperparameter orderings violated".into()));
    }
    Ok(())
}
