// SPDX-License-Identifier: MIT OR Apache-2.0

//! Loss oracles shared by the probing optimizer and the landscape sweeps.

use crate::error::{CrhError, Result};
use crate::linalg::Matrix;
use crate::Vec64;

/// A steering loss over representation-space vectors.
///
/// Oracles backed by a differentiable model provide gradients; replayed loss
/// tables only answer `loss` and can drive sweeps but not optimization.
pub trait LossOracle: Sync {
    fn dim(&self) -> usize;

    fn loss(&self, v: &Vec64) -> Result<f64>;

    fn loss_and_grad(&self, _v: &Vec64) -> Result<(f64, Vec64)> {
        Err(CrhError::GradientUnavailable)
    }
}

impl<O: LossOracle + ?Sized> LossOracle for &O {
    fn dim(&self) -> usize {
        (**self).dim()
    }
    fn loss(&self, v: &Vec64) -> Result<f64> {
        (**self).loss(v)
    }
    fn loss_and_grad(&self, v: &Vec64) -> Result<(f64, Vec64)> {
        (**self).loss_and_grad(v)
    }
}

/// Closure-backed oracle, mostly for tests and ad-hoc landscapes.
pub struct FnOracle<F> {
    dim: usize,
    f: F,
}

impl<F> FnOracle<F>
where
    F: Fn(&Vec64) -> f64 + Sync,
{
    pub fn new(dim: usize, f: F) -> Self {
        Self { dim, f }
    }
}

impl<F> LossOracle for FnOracle<F>
where
    F: Fn(&Vec64) -> f64 + Sync,
{
    fn dim(&self) -> usize {
        self.dim
    }

    fn loss(&self, v: &Vec64) -> Result<f64> {
        v.check_dim(self.dim)?;
        Ok((self.f)(v))
    }
}

/// Replays a precomputed table of `(probe vector, loss)` pairs.
///
/// Lookups match a stored probe when every coordinate agrees within `tol`.
pub struct ReplayOracle {
    probes: Matrix<f64>,
    losses: Vec<f64>,
    tol: f64,
}

impl ReplayOracle {
    pub fn new(probes: Matrix<f64>, losses: Vec<f64>, tol: f64) -> Result<Self> {
        if probes.rows() != losses.len() {
            return Err(CrhError::DimensionMismatch {
                expected: probes.rows(),
                actual: losses.len(),
            });
        }
        Ok(Self { probes, losses, tol })
    }
}

impl LossOracle for ReplayOracle {
    fn dim(&self) -> usize {
        self.probes.cols()
    }

    fn loss(&self, v: &Vec64) -> Result<f64> {
        v.check_dim(self.dim())?;
        (0..self.probes.rows())
            .find(|&r| {
                self.probes
                    .row(r)
                    .iter()
                    .zip(v.iter())
                    .all(|(a, b)| (a - b).abs() <= self.tol)
            })
            .map(|r| self.losses[r])
            .ok_or_else(|| CrhError::InvalidArgument("probe not present in replay table".into()))
    }
}
