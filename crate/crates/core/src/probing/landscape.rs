// SPDX-License-Identifier: MIT OR Apache-2.0

//! Summaries of probe grids, per-step normalized plane maps, phase-extreme
//! trajectories, and the end-to-end probing run with its random-frame
//! control.

use serde::{Deserialize, Serialize};

use super::cylinder::{build_cylinder, CylinderFrame};
use super::optimize::{optimize_budgeted, BudgetSchedule, OptimizedSet};
use super::sweep::{phase_grid, radius_grid, sweep, ProbeGrid, SweepSpec};
use crate::error::{CrhError, Result};
use crate::oracle::LossOracle;
use crate::Vec64;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ProbeSummary {
    pub mean_loss: f64,
    pub loss_std: f64,
    /// Range of the per-axial-step mean loss.
    pub axis_range: f64,
    /// Range of the per-phase mean loss.
    pub phase_range: f64,
}

fn finite_mean(xs: impl Iterator<Item = f64>) -> f64 {
    let (s, n) = xs
        .filter(|x| x.is_finite())
        .fold((0.0, 0usize), |(s, n), x| (s + x, n + 1));
    if n == 0 {
        f64::NAN
    } else {
        s / n as f64
    }
}

fn range(xs: &[f64]) -> f64 {
    let finite = xs.iter().copied().filter(|x| x.is_finite());
    let (lo, hi) = finite.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), x| (lo.min(x), hi.max(x)));
    if hi >= lo {
        hi - lo
    } else {
        f64::NAN
    }
}

impl ProbeGrid {
    /// Mean over phases and radii for each axial step.
    pub fn step_means(&self) -> Vec<f64> {
        let (na, np, nr) = self.shape();
        (0..na)
            .map(|a| {
                finite_mean(
                    (0..np)
                        .flat_map(|p| (0..nr).map(move |r| (p, r)))
                        .map(|(p, r)| self.get(a, p, r)),
                )
            })
            .collect()
    }

    /// Mean over axial steps and radii for each phase.
    pub fn phase_means(&self) -> Vec<f64> {
        let (na, np, nr) = self.shape();
        (0..np)
            .map(|p| {
                finite_mean(
                    (0..na)
                        .flat_map(|a| (0..nr).map(move |r| (a, r)))
                        .map(|(a, r)| self.get(a, p, r)),
                )
            })
            .collect()
    }

    /// Min-max scaled `[phase][radius]` map per axial step. Constant steps
    /// map to zeros.
    pub fn normalized_maps(&self) -> Vec<Vec<Vec<f64>>> {
        let (na, np, nr) = self.shape();
        (0..na)
            .map(|a| {
                let cells: Vec<f64> = (0..np)
                    .flat_map(|p| (0..nr).map(move |r| (p, r)))
                    .map(|(p, r)| self.get(a, p, r))
                    .collect();
                let lo = cells
                    .iter()
                    .copied()
                    .filter(|x| x.is_finite())
                    .fold(f64::INFINITY, f64::min);
                let span = range(&cells);
                (0..np)
                    .map(|p| {
                        (0..nr)
                            .map(|r| {
                                let x = self.get(a, p, r);
                                if span > 0.0 {
                                    (x - lo) / span
                                } else if x.is_finite() {
                                    0.0
                                } else {
                                    f64::NAN
                                }
                            })
                            .collect()
                    })
                    .collect()
            })
            .collect()
    }
}

pub fn summarize(grid: &ProbeGrid) -> ProbeSummary {
    let finite: Vec<f64> = grid.loss.iter().copied().filter(|x| x.is_finite()).collect();
    let mean = finite_mean(finite.iter().copied());
    let var = finite_mean(finite.iter().map(|x| (x - mean) * (x - mean)));
    ProbeSummary {
        mean_loss: mean,
        loss_std: var.sqrt(),
        axis_range: range(&grid.step_means()),
        phase_range: range(&grid.phase_means()),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PhaseExtremes {
    pub min_phase_index: usize,
    pub max_phase_index: usize,
    pub min_phase: f64,
    pub max_phase: f64,
    /// Loss per axial step (averaged over radii) at the minimizing phase.
    pub min_trajectory: Vec<f64>,
    pub max_trajectory: Vec<f64>,
}

fn arg_extreme(xs: &[f64], better: impl Fn(f64, f64) -> bool) -> Option<usize> {
    let mut best: Option<usize> = None;
    for (i, &x) in xs.iter().enumerate() {
        if x.is_finite() && best.is_none_or(|b| better(x, xs[b])) {
            best = Some(i);
        }
    }
    best
}

pub fn phase_extremes(grid: &ProbeGrid) -> Result<PhaseExtremes> {
    let (na, _, nr) = grid.shape();
    if grid.loss.is_empty() {
        return Err(CrhError::InvalidArgument("empty probe grid".into()));
    }
    let means = grid.phase_means();
    let lo = arg_extreme(&means, |a, b| a < b);
    let hi = arg_extreme(&means, |a, b| a > b);
    let (Some(lo), Some(hi)) = (lo, hi) else {
        return Err(CrhError::NonFinite("every probe cell failed".into()));
    };
    let trajectory = |p: usize| -> Vec<f64> {
        (0..na)
            .map(|a| finite_mean((0..nr).map(|r| grid.get(a, p, r))))
            .collect()
    };
    Ok(PhaseExtremes {
        min_phase_index: lo,
        max_phase_index: hi,
        min_phase: grid.phases[lo],
        max_phase: grid.phases[hi],
        min_trajectory: trajectory(lo),
        max_trajectory: trajectory(hi),
    })
}

/// Where probes sit along the axis.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case", deny_unknown_fields)]
pub enum AxialMode {
    /// Axial coordinates of the optimized vectors, deduplicated and sorted.
    Optimized,
    Explicit {
        positions: Vec<f64>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ProbeSettings {
    pub schedule: BudgetSchedule,
    pub phases: usize,
    pub radii: usize,
    pub axial: AxialMode,
    /// Offset probe points by the cylinder origin.
    pub with_origin: bool,
}

impl Default for ProbeSettings {
    fn default() -> Self {
        Self {
            schedule: BudgetSchedule::default(),
            phases: 30,
            radii: 5,
            axial: AxialMode::Optimized,
            with_origin: true,
        }
    }
}

impl ProbeSettings {
    pub fn validate(&self) -> Result<()> {
        self.schedule.validate()?;
        if self.phases == 0 || self.radii == 0 {
            return Err(CrhError::InvalidArgument(
                "sweep needs phases >= 1 and radii >= 1".into(),
            ));
        }
        if let AxialMode::Explicit { positions } = &self.axial {
            if positions.is_empty() || positions.iter().any(|x| !x.is_finite()) {
                return Err(CrhError::InvalidArgument(
                    "explicit axial positions must be finite and nonempty".into(),
                ));
            }
        }
        Ok(())
    }
}

const AXIAL_DEDUP: f64 = 1e-9;

/// Sorted axial coordinates of `set` in `frame`, merging values closer than
/// a small relative tolerance.
pub fn optimized_axial_positions(set: &OptimizedSet, frame: &CylinderFrame, with_origin: bool) -> Vec<f64> {
    let mut ts: Vec<f64> = set
        .vectors
        .row_vectors()
        .iter()
        .map(|v| frame.coordinates(v, with_origin).0)
        .collect();
    ts.sort_by(f64::total_cmp);
    let scale = ts.iter().fold(1.0_f64, |m, t| m.max(t.abs()));
    ts.dedup_by(|a, b| (*a - *b).abs() <= AXIAL_DEDUP * scale);
    ts
}

#[derive(Debug, Clone, Serialize)]
pub struct ProbeRun {
    pub optimized: OptimizedSet,
    pub frame: CylinderFrame,
    pub explained_variance_ratio: Vec<f64>,
    pub grid: ProbeGrid,
    pub summary: ProbeSummary,
    pub extremes: PhaseExtremes,
}

impl ProbeRun {
    pub fn sweep_spec(&self, with_origin: bool) -> SweepSpec {
        SweepSpec {
            axial_positions: self.grid.axial_positions.clone(),
            phases: self.grid.phases.clone(),
            radii: self.grid.radii.clone(),
            with_origin,
        }
    }
}

/// Optimize, fit the cylinder, sweep, summarize.
pub fn probe<O: LossOracle + ?Sized>(oracle: &O, v_d: &Vec64, settings: &ProbeSettings) -> Result<ProbeRun> {
    settings.validate()?;
    let optimized = optimize_budgeted(oracle, v_d, &settings.schedule)?;
    let (frame, pca) = build_cylinder(&optimized)?;
    let axial_positions = match &settings.axial {
        AxialMode::Optimized => optimized_axial_positions(&optimized, &frame, settings.with_origin),
        AxialMode::Explicit { positions } => positions.clone(),
    };
    let spec = SweepSpec {
        axial_positions,
        phases: phase_grid(settings.phases),
        radii: radius_grid(settings.radii, v_d.norm()),
        with_origin: settings.with_origin,
    };
    let grid = sweep(oracle, &frame, &spec)?;
    let summary = summarize(&grid);
    let extremes = phase_extremes(&grid)?;
    Ok(ProbeRun {
        optimized,
        frame,
        explained_variance_ratio: pca.explained_variance_ratio,
        grid,
        summary,
        extremes,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct NullControl {
    pub optimized: ProbeSummary,
    pub random: ProbeSummary,
    pub random_frame: CylinderFrame,
    pub optimized_grid: ProbeGrid,
    pub random_grid: ProbeGrid,
    pub explained_variance_ratio: Vec<f64>,
}

/// Repeats the sweep with a seeded random orthonormal frame at the same
/// origin and with the same grid.
pub fn null_control<O: LossOracle + ?Sized>(
    oracle: &O,
    v_d: &Vec64,
    seed: u64,
    settings: &ProbeSettings,
) -> Result<NullControl> {
    let run = probe(oracle, v_d, settings)?;
    let random_frame = CylinderFrame::random(run.frame.origin.clone(), seed)?;
    let random_grid = sweep(oracle, &random_frame, &run.sweep_spec(settings.with_origin))?;
    Ok(NullControl {
        optimized: run.summary,
        random: summarize(&random_grid),
        random_frame,
        optimized_grid: run.grid,
        random_grid,
        explained_variance_ratio: run.explained_variance_ratio,
    })
}
