//! Quasi-one-dimensional finite-volume engine model: geometry, grid,
//! conservative state, numerical fluxes, steady-state driver, thrust and
//! unstart analysis.

pub mod analysis;
pub mod flux;
pub mod geometry;
pub mod grid;
pub mod solver;
pub mod state;

pub use analysis::{
    grid_convergence_study, isentropic_state_analysis, ConvergenceStudy, Station, StationAnalysis,
};
pub use geometry::{EngineGeometry, GeometryConfig, GeometryError};
pub use grid::Grid;
pub use solver::{
    compute_thrust, detect_unstart, BoundaryCondition, EngineSolver, InletCondition, OutletMode,
    ResidualSample, SolverConfig, SolverError, SteadyResult, UnstartReport,
};
pub use state::Conserved;
