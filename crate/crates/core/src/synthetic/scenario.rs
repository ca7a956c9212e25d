// SPDX-License-Identifier: MIT OR Apache-2.0

//! Serializable recipes for synthetic experiments.

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use super::basis::{gaussian_unit, gen_basis, BasisSpec, ConceptBasis};
use super::latent::{compose, LatentConfig};
use super::model::SyntheticModel;
use crate::error::{CrhError, Result};
use crate::linalg::Matrix;
use crate::rng::{seeded, Stream};
use crate::steering::ActivationSet;

/// How concept strengths are chosen.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum AlphaSpec {
    /// Target strength fixed, non-target strengths uniform in `[-spread, spread]`.
    Random {
        target: f64,
        spread: f64,
    },
    Explicit {
        values: Vec<f64>,
    },
}

impl Default for AlphaSpec {
    fn default() -> Self {
        AlphaSpec::Random {
            target: 1.0,
            spread: 0.5,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScenarioConfig {
    pub d: usize,
    pub n: usize,
    pub seed: u64,
    pub coherence: f64,
    pub orthogonalize: bool,
    pub target: usize,
    pub alpha: AlphaSpec,
    pub mu: f64,
    pub tau_c: f64,
    pub tau_x: f64,
    /// Norm of the random origin representation.
    pub origin_scale: f64,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        Self {
            d: 64,
            n: 8,
            seed: 0,
            coherence: 0.1,
            orthogonalize: false,
            target: 0,
            alpha: AlphaSpec::default(),
            mu: 0.5,
            tau_c: 0.5,
            tau_x: 0.5,
            origin_scale: 1.0,
        }
    }
}

/// Everything a scenario materializes to.
#[derive(Debug, Clone, Serialize)]
pub struct Scenario {
    pub spec: ScenarioConfig,
    pub basis: ConceptBasis,
    pub config: LatentConfig,
    pub model: SyntheticModel,
}

impl ScenarioConfig {
    pub fn with_seed(&self, seed: u64) -> Self {
        Self { seed, ..self.clone() }
    }

    pub fn basis_spec(&self) -> BasisSpec {
        BasisSpec {
            d: self.d,
            n: self.n,
            seed: self.seed,
            coherence: self.coherence,
            orthogonalize: self.orthogonalize,
            target: self.target,
        }
    }

    pub fn alpha(&self) -> Result<Vec<f64>> {
        match &self.alpha {
            AlphaSpec::Explicit { values } => {
                if values.len() != self.n {
                    return Err(CrhError::DimensionMismatch {
                        expected: self.n,
                        actual: values.len(),
                    });
                }
                Ok(values.clone())
            }
            AlphaSpec::Random { target, spread } => {
                if !(*spread >= 0.0) {
                    return Err(CrhError::InvalidArgument(format!("negative spread {spread}")));
                }
                let mut rng = seeded(self.seed, Stream::Alpha);
                Ok((0..self.n)
                    .map(|i| {
                        let x = if *spread > 0.0 {
                            rng.random_range(-*spread..=*spread)
                        } else {
                            0.0
                        };
                        if i == self.target {
                            *target
                        } else {
                            x
                        }
                    })
                    .collect())
            }
        }
    }

    pub fn build(&self) -> Result<Scenario> {
        let basis = gen_basis(&self.basis_spec())?;
        let config = compose(&basis, &self.alpha()?)?;
        config.unit_axis()?;
        let mut rng = seeded(self.seed, Stream::Origin);
        let origin = gaussian_unit(&mut rng, self.d).scaled(self.origin_scale);
        let model = SyntheticModel::new(basis.clone(), config.clone(), origin, self.mu, self.tau_c, self.tau_x)?;
        Ok(Scenario {
            spec: self.clone(),
            basis,
            config,
            model,
        })
    }
}

impl Scenario {
    /// Paired activations for the target concept: negatives scatter around
    /// the origin, positives add `v_d` plus noise of relative size `noise`.
    pub fn contrastive_pairs(&self, pairs: usize, noise: f64) -> Result<ActivationSet<f64>> {
        if pairs == 0 || !(noise >= 0.0) {
            return Err(CrhError::InvalidArgument(format!(
                "need pairs >= 1 and noise >= 0, got {pairs} and {noise}"
            )));
        }
        let d = self.spec.d;
        let v_d = &self.config.v_d;
        let sd = noise * v_d.norm() / (d as f64).sqrt();
        let scatter = 1.0 / (d as f64).sqrt();
        let mut rng = seeded(self.spec.seed, Stream::Pairs);
        let mut pos = Vec::with_capacity(pairs);
        let mut neg = Vec::with_capacity(pairs);
        for _ in 0..pairs {
            let mut n = self.model.origin.clone();
            let mut p = v_d.clone();
            for k in 0..d {
                let base: f64 = StandardNormal.sample(&mut rng);
                n[k] += scatter * base;
                let e: f64 = StandardNormal.sample(&mut rng);
                p[k] += n[k] + sd * e;
            }
            pos.push(p);
            neg.push(n);
        }
        ActivationSet::new(
            Matrix::from_rows(&pos)?,
            Matrix::from_rows(&neg)?,
            0,
            format!("concept-{}", self.spec.target),
        )
    }
}
