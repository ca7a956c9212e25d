// SPDX-License-Identifier: MIT OR Apache-2.0

//! Cylinder frames: PCA-derived from an optimized set, or random for the
//! null control.

use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use super::optimize::OptimizedSet;
use crate::error::{CrhError, Result};
use crate::linalg::{gram_schmidt, pca, PcaResult};
use crate::rng::{seeded, Stream};
use crate::Vec64;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CylinderFrame {
    pub origin: Vec64,
    pub axis: Vec64,
    pub e1: Vec64,
    pub e2: Vec64,
}

const ORTHO_TOL: f64 = 1e-8;

impl CylinderFrame {
    pub fn new(origin: Vec64, axis: Vec64, e1: Vec64, e2: Vec64) -> Result<Self> {
        let d = origin.dim();
        for v in [&axis, &e1, &e2] {
            v.check_dim(d)?;
        }
        let frame = Self { origin, axis, e1, e2 };
        let err = frame.orthonormality_error();
        if err > ORTHO_TOL {
            return Err(CrhError::InvalidArgument(format!(
                "frame not orthonormal (max Gram deviation {err:e})"
            )));
        }
        Ok(frame)
    }

    pub fn dim(&self) -> usize {
        self.origin.dim()
    }

    /// Max deviation of the Gram matrix of `(axis, e1, e2)` from identity.
    pub fn orthonormality_error(&self) -> f64 {
        let b = [&self.axis, &self.e1, &self.e2];
        let mut worst: f64 = 0.0;
        for i in 0..3 {
            for j in 0..3 {
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((b[i].dot(b[j]) - target).abs());
            }
        }
        worst
    }

    /// `[origin +] t·axis + ρ(cos φ·e1 + sin φ·e2)`.
    pub fn point(&self, t: f64, phi: f64, rho: f64, with_origin: bool) -> Vec64 {
        let mut p = if with_origin {
            self.origin.clone()
        } else {
            Vec64::zeros(self.dim())
        };
        p.axpy(t, &self.axis);
        p.axpy(rho * phi.cos(), &self.e1);
        p.axpy(rho * phi.sin(), &self.e2);
        p
    }

    /// Axial, in-plane and phase coordinates of `v`.
    pub fn coordinates(&self, v: &Vec64, with_origin: bool) -> (f64, f64, f64) {
        let x = if with_origin { v - &self.origin } else { v.clone() };
        let (a, b) = (x.dot(&self.e1), x.dot(&self.e2));
        (x.dot(&self.axis), a.hypot(b), crate::synthetic::wrap_phase(b.atan2(a)))
    }

    /// Random orthonormal frame sharing `origin`.
    pub fn random(origin: Vec64, seed: u64) -> Result<Self> {
        let d = origin.dim();
        if d < 3 {
            return Err(CrhError::DegenerateCylinder { rank: d });
        }
        let mut rng = seeded(seed, Stream::NullFrame);
        loop {
            let draws: Vec<Vec64> = (0..3)
                .map(|_| (0..d).map(|_| StandardNormal.sample(&mut rng)).collect())
                .collect();
            let q = gram_schmidt(&draws, 1e-8);
            if q.len() == 3 {
                let mut it = q.into_iter();
                let (a, b, c) = (it.next().unwrap(), it.next().unwrap(), it.next().unwrap());
                return Self::new(origin, a, b, c);
            }
        }
    }
}

pub const MIN_CYLINDER_ROWS: usize = 4;

/// Axis = PC1, plane = (PC2, PC3), origin = mean of the optimized vectors.
pub fn build_cylinder(set: &OptimizedSet) -> Result<(CylinderFrame, PcaResult<f64>)> {
    let rows = set.vectors.rows();
    if rows < MIN_CYLINDER_ROWS {
        return Err(CrhError::DegenerateCylinder {
            rank: rows.saturating_sub(1),
        });
    }
    if set.vectors.cols() < 3 {
        return Err(CrhError::DegenerateCylinder {
            rank: set.vectors.cols(),
        });
    }
    let p = pca(&set.vectors, 3)?;
    if p.rank() < 3 {
        return Err(CrhError::DegenerateCylinder { rank: p.rank() });
    }
    let c = &p.components;
    let frame = CylinderFrame::new(p.mean.clone(), c[0].clone(), c[1].clone(), c[2].clone())?;
    Ok((frame, p))
}
