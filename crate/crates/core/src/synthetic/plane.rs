// SPDX-License-Identifier: MIT OR Apache-2.0

//! The sample-specific normal plane and the axis/plane/residual split of a
//! steering vector.

use serde::Serialize;

use super::basis::ConceptBasis;
use super::latent::LatentConfig;
use crate::error::{CrhError, Result};
use crate::linalg::{gram_schmidt, reject_from, split_on_unit, uncentered_directions};
use crate::Vec64;

const PLANE_TOL: f64 = 1e-10;

/// Orthonormal plane `(e1, e2)` orthogonal to the unit axis, together with the
/// in-plane coordinates of every concept's perpendicular contribution.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NormalPlane {
    pub axis: Vec64,
    pub e1: Vec64,
    pub e2: Vec64,
    /// `Proj(v⟂⁽ⁱ⁾)` in `(e1, e2)` coordinates.
    pub parts: Vec<[f64; 2]>,
    pub target: usize,
    /// True when the non-target concepts had no direction independent of
    /// `e1` and `e2` was completed from the standard basis.
    pub e2_completed: bool,
}

/// Steering vector split as `axial·axis + plane + residual`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Decomposition {
    pub axial: f64,
    pub plane: [f64; 2],
    pub residual: Vec64,
}

impl Decomposition {
    pub fn plane_norm(&self) -> f64 {
        self.plane[0].hypot(self.plane[1])
    }

    /// Phase of the in-plane component in `[0, 2π)`.
    pub fn phase(&self) -> f64 {
        wrap_phase(self.plane[1].atan2(self.plane[0]))
    }
}

pub fn wrap_phase(phi: f64) -> f64 {
    let tau = std::f64::consts::TAU;
    let w = phi.rem_euclid(tau);
    if w >= tau {
        0.0
    } else {
        w
    }
}

impl NormalPlane {
    /// Builds a plane from an explicit orthonormal frame.
    pub fn from_frame(axis: Vec64, e1: Vec64, e2: Vec64, parts: Vec<[f64; 2]>, target: usize) -> Result<Self> {
        let d = axis.dim();
        e1.check_dim(d)?;
        e2.check_dim(d)?;
        for (name, g) in [
            ("axis·e1", axis.dot(&e1)),
            ("axis·e2", axis.dot(&e2)),
            ("e1·e2", e1.dot(&e2)),
        ] {
            if g.abs() > 1e-8 {
                return Err(CrhError::PlaneUndefined(format!("{name} = {g:e}")));
            }
        }
        if target >= parts.len() {
            return Err(CrhError::InvalidArgument("target index out of range".into()));
        }
        Ok(Self {
            axis,
            e1,
            e2,
            parts,
            target,
            e2_completed: false,
        })
    }

    pub fn project(&self, v: &Vec64) -> [f64; 2] {
        [v.dot(&self.e1), v.dot(&self.e2)]
    }

    pub fn lift(&self, coords: [f64; 2]) -> Vec64 {
        let mut v = self.e1.scaled(coords[0]);
        v.axpy(coords[1], &self.e2);
        v
    }

    pub fn decompose(&self, v: &Vec64) -> Result<Decomposition> {
        v.check_dim(self.axis.dim())?;
        let s = split_on_unit(v, &self.axis);
        let plane = self.project(&s.perp);
        let mut residual = s.perp;
        residual.axpy(-plane[0], &self.e1);
        residual.axpy(-plane[1], &self.e2);
        Ok(Decomposition {
            axial: s.axial,
            plane,
            residual,
        })
    }

    pub fn parts_sum(&self) -> [f64; 2] {
        self.parts
            .iter()
            .fold([0.0, 0.0], |acc, p| [acc[0] + p[0], acc[1] + p[1]])
    }

    /// Amplitude and phase of each projected concept part.
    pub fn phasors(&self) -> Vec<(f64, f64)> {
        self.parts
            .iter()
            .map(|p| (p[0].hypot(p[1]), wrap_phase(p[1].atan2(p[0]))))
            .collect()
    }
}

/// Completes `(axis, e1)` with the standard basis vector that leaves the
/// largest residual.
fn complete_frame(axis: &Vec64, e1: &Vec64) -> Result<Vec64> {
    let d = axis.dim();
    let frame = [axis.clone(), e1.clone()];
    let mut best: Option<Vec64> = None;
    for k in 0..d {
        let r = reject_from(&Vec64::basis(d, k), &frame);
        if best.as_ref().is_none_or(|b| r.norm() > b.norm() + 1e-12) {
            best = Some(r);
        }
    }
    best.and_then(|b| b.normalized().ok())
        .map(|b| b.canonical_sign())
        .ok_or_else(|| CrhError::PlaneUndefined("ambient dimension too small".into()))
}

/// Normal plane spanned by the target's perpendicular direction and the
/// leading direction of the other concepts' perpendicular directions.
pub fn normal_plane(config: &LatentConfig, basis: &ConceptBasis) -> Result<NormalPlane> {
    if basis.dim() < 3 {
        return Err(CrhError::PlaneUndefined(
            "a normal plane needs ambient dimension >= 3".into(),
        ));
    }
    config.v_d.check_dim(basis.dim())?;
    let axis = config.unit_axis()?;
    let target = basis.target();
    let perp_dirs: Vec<Vec64> = basis
        .directions()
        .iter()
        .map(|a| split_on_unit(a, &axis).perp)
        .collect();
    let e1 = perp_dirs[target]
        .normalized()
        .map_err(|_| CrhError::PlaneUndefined("target concept is collinear with the axis".into()))?;
    if perp_dirs[target].norm() <= PLANE_TOL {
        return Err(CrhError::PlaneUndefined(
            "target concept is collinear with the axis".into(),
        ));
    }
    let others: Vec<Vec64> = perp_dirs
        .iter()
        .enumerate()
        .filter(|&(i, _)| i != target)
        .map(|(_, p)| p.clone())
        .collect();
    let (_, lead) = uncentered_directions(&others, 1)?;
    let frame = [axis.clone(), e1.clone()];
    let candidate = lead.into_iter().next().and_then(|pc| {
        let ortho = gram_schmidt(&[axis.clone(), e1.clone(), pc], 1e-8);
        ortho.get(2).cloned()
    });
    let (e2, completed) = match candidate {
        Some(e2) => (reject_from(&e2, &frame).normalized()?, false),
        None => (complete_frame(&axis, &e1)?, true),
    };
    let parts = config
        .alpha
        .iter()
        .zip(&perp_dirs)
        .map(|(a, p)| [a * p.dot(&e1), a * p.dot(&e2)])
        .collect();
    Ok(NormalPlane {
        axis,
        e1,
        e2,
        parts,
        target,
        e2_completed: completed,
    })
}
