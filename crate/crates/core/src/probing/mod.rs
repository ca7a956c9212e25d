// SPDX-License-Identifier: MIT OR Apache-2.0

//! Probing: budgeted optimization, PCA cylinders, landscape sweeps and the
//! random-frame control.

mod cylinder;
mod landscape;
mod optimize;
mod sweep;

pub use cylinder::{build_cylinder, CylinderFrame, MIN_CYLINDER_ROWS};
pub use landscape::{
    null_control, optimized_axial_positions, phase_extremes, probe, summarize, AxialMode, NullControl, PhaseExtremes,
    ProbeRun, ProbeSettings, ProbeSummary,
};
pub use optimize::{optimize_budgeted, BudgetSchedule, OptimizedSet};
pub use sweep::{phase_grid, radius_grid, sweep, ProbeGrid, SweepSpec};
