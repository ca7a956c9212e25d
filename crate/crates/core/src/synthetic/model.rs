// SPDX-License-Identifier: MIT OR Apache-2.0

//! A differentiable desk-scale stand-in for a model's output representation
//! space, used to drive probing and the implication checks.

use serde::Serialize;

use super::basis::ConceptBasis;
use super::latent::LatentConfig;
use crate::error::{CrhError, Result};
use crate::linalg::{gram_schmidt, reject_from};
use crate::oracle::LossOracle;
use crate::Vec64;

#[derive(Debug, Clone, Serialize)]
pub struct SyntheticModel {
    pub basis: ConceptBasis,
    pub config: LatentConfig,
    /// Representation of the unsteered input.
    pub origin: Vec64,
    /// Representation expressing the target concept, `origin + v_d`.
    pub target_state: Vec64,
    /// Weight of the non-target interference penalty.
    pub mu: f64,
    pub tau_c: f64,
    pub tau_x: f64,
    #[serde(skip)]
    span: Vec<Vec64>,
}

impl SyntheticModel {
    pub fn new(
        basis: ConceptBasis,
        config: LatentConfig,
        origin: Vec64,
        mu: f64,
        tau_c: f64,
        tau_x: f64,
    ) -> Result<Self> {
        let d = basis.dim();
        origin.check_dim(d)?;
        config.v_d.check_dim(d)?;
        if config.alpha.len() != basis.n() {
            return Err(CrhError::DimensionMismatch {
                expected: basis.n(),
                actual: config.alpha.len(),
            });
        }
        if !(mu >= 0.0) || !(tau_c > 0.0) || !(tau_x > 0.0) {
            return Err(CrhError::InvalidArgument(format!(
                "need mu >= 0, tau_c > 0, tau_x > 0 (got {mu}, {tau_c}, {tau_x})"
            )));
        }
        let mut target_state = origin.clone();
        target_state.axpy(1.0, &config.v_d);
        let span = gram_schmidt(basis.directions(), 1e-10);
        Ok(Self {
            basis,
            config,
            origin,
            target_state,
            mu,
            tau_c,
            tau_x,
            span,
        })
    }

    pub fn dim(&self) -> usize {
        self.basis.dim()
    }

    pub fn v_d(&self) -> &Vec64 {
        &self.config.v_d
    }

    /// Orthonormal basis of the concept span.
    pub fn span_basis(&self) -> &[Vec64] {
        &self.span
    }

    /// Distance of `state` from the affine concept span through the origin
    /// representation.
    pub fn off_span_distance(&self, state: &Vec64) -> Result<f64> {
        state.check_dim(self.dim())?;
        Ok(reject_from(&(state - &self.origin), &self.span).norm())
    }

    /// `‖r + v − r_c‖² + μ Σ_{i≠c} ⟨v, aᵢ⟩²` and its gradient.
    pub fn loss_grad(&self, v: &Vec64) -> Result<(f64, Vec64)> {
        v.check_dim(self.dim())?;
        let mut resid = &self.origin + v;
        resid.axpy(-1.0, &self.target_state);
        let mut loss = resid.norm_sq();
        let mut grad = resid.scaled(2.0);
        let c = self.basis.target();
        for (i, a) in self.basis.directions().iter().enumerate() {
            if i == c {
                continue;
            }
            let p = v.dot(a);
            loss += self.mu * p * p;
            grad.axpy(2.0 * self.mu * p, a);
        }
        Ok((loss, grad))
    }

    /// Same model with a different origin representation; the difference
    /// vector is unchanged.
    pub fn with_origin(&self, origin: Vec64) -> Result<Self> {
        Self::new(
            self.basis.clone(),
            self.config.clone(),
            origin,
            self.mu,
            self.tau_c,
            self.tau_x,
        )
    }

    pub fn with_thresholds(&self, tau_c: f64, tau_x: f64) -> Result<Self> {
        Self::new(
            self.basis.clone(),
            self.config.clone(),
            self.origin.clone(),
            self.mu,
            tau_c,
            tau_x,
        )
    }
}

impl LossOracle for SyntheticModel {
    fn dim(&self) -> usize {
        self.basis.dim()
    }

    fn loss(&self, v: &Vec64) -> Result<f64> {
        self.loss_grad(v).map(|(l, _)| l)
    }

    fn loss_and_grad(&self, v: &Vec64) -> Result<(f64, Vec64)> {
        self.loss_grad(v)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numdiff::finite_diff_grad;
    use crate::synthetic::{compose, gen_basis, BasisSpec};

    fn model(mu: f64) -> SyntheticModel {
        let basis = gen_basis(&BasisSpec {
            d: 6,
            n: 4,
            seed: 11,
            coherence: 0.2,
            orthogonalize: false,
            target: 0,
        })
        .unwrap();
        let config = compose(&basis, &[1.0, 0.4, -0.3, 0.2]).unwrap();
        SyntheticModel::new(basis, config, vec![0.5; 6].into(), mu, 0.5, 0.5).unwrap()
    }

    #[test]
    fn minimum_at_difference_vector() {
        let m = model(0.0);
        let (l, g) = m.loss_grad(&m.v_d().clone()).unwrap();
        assert!(l < 1e-24 && g.norm() < 1e-12);
    }

    #[test]
    fn zero_steer_costs_vd_norm() {
        let m = model(0.5);
        let l = m.loss(&Vec64::zeros(6)).unwrap();
        assert!((l - m.v_d().norm_sq()).abs() < 1e-12);
    }

    #[test]
    fn gradient_matches_central_differences() {
        let m = model(0.5);
        let v: Vec64 = vec![0.3, -0.2, 0.9, 0.1, -0.7, 0.4].into();
        let (_, g) = m.loss_grad(&v).unwrap();
        let fd = finite_diff_grad(|x: &Vec64| m.loss(x).unwrap(), &v, 1e-5).unwrap();
        assert!((&fd - &g).norm() <= 1e-5 * g.norm());
    }

    #[test]
    fn in_span_has_zero_distance() {
        let m = model(0.5);
        let mut s = m.origin.clone();
        s.axpy(2.0, m.basis.direction(1));
        assert!(m.off_span_distance(&s).unwrap() < 1e-12);
    }
}
