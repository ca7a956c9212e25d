// SPDX-License-Identifier: MIT OR Apache-2.0

//! Latent concept strengths, the difference vector they compose, and the
//! axis split of every concept contribution.

use serde::{Deserialize, Serialize};

use super::basis::ConceptBasis;
use crate::error::{CrhError, Result};
use crate::linalg::split_on_unit;
use crate::Vec64;

/// Concept strengths `α` and the difference vector `v_d = Σ αᵢ aᵢ`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LatentConfig {
    pub alpha: Vec<f64>,
    pub v_d: Vec64,
}

impl LatentConfig {
    /// A zero (or numerically vanishing) difference vector has no axis.
    pub fn is_degenerate(&self) -> bool {
        let scale: f64 = self.alpha.iter().map(|a| a.abs()).sum::<f64>().max(1.0);
        !(self.v_d.norm() > 1e-12 * scale)
    }

    pub fn unit_axis(&self) -> Result<Vec64> {
        if self.is_degenerate() {
            return Err(CrhError::DegenerateAxis("difference vector is zero".into()));
        }
        self.v_d.normalized()
    }
}

pub fn compose(basis: &ConceptBasis, alpha: &[f64]) -> Result<LatentConfig> {
    if alpha.len() != basis.n() {
        return Err(CrhError::DimensionMismatch {
            expected: basis.n(),
            actual: alpha.len(),
        });
    }
    let mut v_d = Vec64::zeros(basis.dim());
    for (a, dir) in alpha.iter().zip(basis.directions()) {
        v_d.axpy(*a, dir);
    }
    let config = LatentConfig {
        alpha: alpha.to_vec(),
        v_d,
    };
    if config.is_degenerate() {
        log::debug!("compose: degenerate difference vector");
    }
    Ok(config)
}

/// Per-concept axis coefficients `d⁽ⁱ⁾` and perpendicular parts `v⟂⁽ⁱ⁾`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConceptSplit {
    pub axis: Vec64,
    pub axial: Vec<f64>,
    pub perp: Vec<Vec64>,
}

impl ConceptSplit {
    pub fn axial_sum(&self) -> f64 {
        self.axial.iter().sum()
    }

    pub fn perp_sum(&self) -> Vec64 {
        let mut s = Vec64::zeros(self.axis.dim());
        for p in &self.perp {
            s.axpy(1.0, p);
        }
        s
    }
}

pub fn split_concepts(config: &LatentConfig, basis: &ConceptBasis) -> Result<ConceptSplit> {
    config.v_d.check_dim(basis.dim())?;
    let axis = config.unit_axis()?;
    let (axial, perp) = config
        .alpha
        .iter()
        .zip(basis.directions())
        .map(|(a, dir)| {
            let s = split_on_unit(&dir.scaled(*a), &axis);
            (s.axial, s.perp)
        })
        .unzip();
    Ok(ConceptSplit { axis, axial, perp })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::synthetic::{gen_basis, BasisSpec};

    fn basis(d: usize, n: usize, seed: u64) -> ConceptBasis {
        gen_basis(&BasisSpec {
            d,
            n,
            seed,
            coherence: 0.0,
            orthogonalize: false,
            target: 0,
        })
        .unwrap()
    }

    #[test]
    fn one_hot_recovers_direction() {
        let b = basis(4, 3, 2);
        let c = compose(&b, &[0.0, 1.0, 0.0]).unwrap();
        assert_eq!(&c.v_d, b.direction(1));
    }

    #[test]
    fn zero_alpha_is_degenerate() {
        let b = basis(4, 3, 2);
        assert!(compose(&b, &[0.0; 3]).unwrap().is_degenerate());
        assert!(compose(&b, &[1.0, 2.0]).is_err());
    }

    #[test]
    fn single_concept_split() {
        let b = basis(5, 1, 9);
        let c = compose(&b, &[2.5]).unwrap();
        let s = split_concepts(&c, &b).unwrap();
        assert!((s.axial[0] - c.v_d.norm()).abs() < 1e-12);
        assert!(s.perp[0].norm() < 1e-12);
    }

    #[test]
    fn antipodal_concepts_cancel() {
        let a: Vec64 = vec![0.6, 0.8, 0.0].into();
        let b = ConceptBasis::new(vec![a.clone(), -&a], 0).unwrap();
        let c = compose(&b, &[1.0, 1.0]).unwrap();
        assert!(matches!(split_concepts(&c, &b), Err(CrhError::DegenerateAxis(_))));
    }
}
