// SPDX-License-Identifier: MIT OR Apache-2.0

//! Loss landscapes over `(axial step, phase, radius)` grids.

use std::f64::consts::TAU;

use rayon::prelude::*;
use serde::Serialize;

use super::cylinder::CylinderFrame;
use crate::error::{CrhError, Result};
use crate::oracle::LossOracle;

/// `k·2π/n` for `k = 0..n`.
pub fn phase_grid(n: usize) -> Vec<f64> {
    (0..n).map(|k| k as f64 * TAU / n as f64).collect()
}

/// `n` evenly spaced radii from 0 to `max` inclusive.
pub fn radius_grid(n: usize, max: f64) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![0.0],
        _ => (0..n).map(|k| max * k as f64 / (n - 1) as f64).collect(),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProbeGrid {
    pub axial_positions: Vec<f64>,
    pub phases: Vec<f64>,
    pub radii: Vec<f64>,
    /// Row-major `[axial][phase][radius]`; failed cells hold NaN.
    pub loss: Vec<f64>,
    pub failed: usize,
}

impl ProbeGrid {
    pub fn shape(&self) -> (usize, usize, usize) {
        (self.axial_positions.len(), self.phases.len(), self.radii.len())
    }

    fn index(&self, a: usize, p: usize, r: usize) -> usize {
        let (_, np, nr) = self.shape();
        (a * np + p) * nr + r
    }

    pub fn get(&self, a: usize, p: usize, r: usize) -> f64 {
        self.loss[self.index(a, p, r)]
    }

    /// Long-form `(axial, phase, radius, loss)` rows in storage order.
    pub fn long_form(&self) -> impl Iterator<Item = [f64; 4]> + '_ {
        let (na, np, nr) = self.shape();
        (0..na).flat_map(move |a| {
            (0..np).flat_map(move |p| {
                (0..nr).map(move |r| {
                    [
                        self.axial_positions[a],
                        self.phases[p],
                        self.radii[r],
                        self.get(a, p, r),
                    ]
                })
            })
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub axial_positions: Vec<f64>,
    pub phases: Vec<f64>,
    pub radii: Vec<f64>,
    /// Offset probes by the frame origin.
    pub with_origin: bool,
}

/// Evaluates the oracle on every grid cell. Cells are independent and run in
/// parallel; an oracle failure marks its cell NaN and is counted.
pub fn sweep<O: LossOracle + ?Sized>(oracle: &O, frame: &CylinderFrame, spec: &SweepSpec) -> Result<ProbeGrid> {
    if frame.dim() != oracle.dim() {
        return Err(CrhError::DimensionMismatch {
            expected: oracle.dim(),
            actual: frame.dim(),
        });
    }
    if spec.axial_positions.is_empty() || spec.phases.is_empty() || spec.radii.is_empty() {
        return Err(CrhError::InvalidArgument("sweep grid has an empty axis".into()));
    }
    let (na, np, nr) = (spec.axial_positions.len(), spec.phases.len(), spec.radii.len());
    let loss: Vec<Option<f64>> = (0..na * np * nr)
        .into_par_iter()
        .map(|idx| {
            let (a, rest) = (idx / (np * nr), idx % (np * nr));
            let (p, r) = (rest / nr, rest % nr);
            let probe = frame.point(spec.axial_positions[a], spec.phases[p], spec.radii[r], spec.with_origin);
            match oracle.loss(&probe) {
                Ok(l) if l.is_finite() => Some(l),
                _ => None,
            }
        })
        .collect();
    let failed = loss.iter().filter(|l| l.is_none()).count();
    if failed > 0 {
        log::warn!("sweep: {failed} of {} cells failed", loss.len());
    }
    Ok(ProbeGrid {
        axial_positions: spec.axial_positions.clone(),
        phases: spec.phases.clone(),
        radii: spec.radii.clone(),
        loss: loss.into_iter().map(|l| l.unwrap_or(f64::NAN)).collect(),
        failed,
    })
}
