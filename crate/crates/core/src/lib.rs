//! Numerical laboratory for solid-fuel-ramjet thrust regulation.
//!
//! The crate couples a quasi-one-dimensional compressible-flow engine model
//! (wall heat addition, thermal-choking unstart) with an adaptive PI
//! controller whose gains are optimized online by retrospective cost
//! adaptive control, and exercises the pair through open-loop envelope
//! mapping, closed-loop regulation experiments, and a planar
//! missile-engagement scenario.

pub mod atmosphere;
pub mod engagement;
pub mod engine;
pub mod envelope;
pub mod gas;
pub mod harness;
pub mod io;
pub mod rcac;

pub use gas::{FlowState, GasModel};
