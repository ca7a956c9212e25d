// SPDX-License-Identifier: MIT OR Apache-2.0

//! Success curves, steerability, and the penalty-strength grid.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::judge::{judge, OutcomeLabel};
use crate::error::{CrhError, Result};
use crate::linalg::{reject_from, split_on_unit, Matrix};
use crate::rng::{seeded, Stream};
use crate::stats::{line_fit, LineFit};
use crate::steering::{apply, apply_penalty, Method, SteeringVector};
use crate::synthetic::{ScenarioConfig, SyntheticModel};
use crate::{Mat64, Vec64};

use rand::Rng;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuccessCurve {
    pub lambdas: Vec<f64>,
    pub success_fraction: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SteerabilityScore {
    pub fit: LineFit<f64>,
    /// Slope per unit steering norm.
    pub score: f64,
}

pub fn steerability(curve: &SuccessCurve, v_norm: f64) -> Result<SteerabilityScore> {
    if !(v_norm > 0.0) {
        return Err(CrhError::InvalidArgument(format!(
            "steering norm {v_norm} must be positive"
        )));
    }
    let fit = line_fit(&curve.lambdas, &curve.success_fraction)?;
    Ok(SteerabilityScore {
        fit,
        score: fit.slope / v_norm,
    })
}

fn label_counts(samples: &[SyntheticModel], v: &SteeringVector<f64>, lambda: f64) -> Result<(usize, usize)> {
    let mut target = 0;
    let mut corrupted = 0;
    for m in samples {
        match judge(m, &apply(&m.origin, v, lambda)?) {
            OutcomeLabel::Target => target += 1,
            OutcomeLabel::Corrupted => corrupted += 1,
            OutcomeLabel::Normal => {}
        }
    }
    Ok((target, corrupted))
}

/// Fraction of samples judged target at each `λ`.
pub fn success_curve(samples: &[SyntheticModel], v: &SteeringVector<f64>, lambdas: &[f64]) -> Result<SuccessCurve> {
    if samples.is_empty() {
        return Err(CrhError::InvalidArgument("no test samples".into()));
    }
    let total = samples.len() as f64;
    let success_fraction = lambdas
        .iter()
        .map(|&l| label_counts(samples, v, l).map(|(t, _)| t as f64 / total))
        .collect::<Result<_>>()?;
    Ok(SuccessCurve {
        lambdas: lambdas.to_vec(),
        success_fraction,
    })
}

/// First `λ` of the sweep at which the sample is judged target.
pub fn emergence_strength(model: &SyntheticModel, v: &SteeringVector<f64>, lambdas: &[f64]) -> Result<Option<f64>> {
    for &l in lambdas {
        if judge(model, &apply(&model.origin, v, l)?) == OutcomeLabel::Target {
            return Ok(Some(l));
        }
    }
    Ok(None)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub rho_steps: usize,
    pub lambda_steps: usize,
    pub lambda_max: f64,
}

impl GridSpec {
    pub fn rhos(&self) -> Vec<f64> {
        linspace(0.0, 1.0, self.rho_steps)
    }

    pub fn lambdas(&self) -> Vec<f64> {
        linspace(0.0, self.lambda_max, self.lambda_steps)
    }
}

fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![lo],
        _ => (0..n).map(|j| lo + (hi - lo) * j as f64 / (n - 1) as f64).collect(),
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct PenaltyGrid {
    pub rhos: Vec<f64>,
    pub lambdas: Vec<f64>,
    /// `[ρ][λ]` fraction of samples labeled target.
    pub activation: Mat64,
    /// `[ρ][λ]` fraction of samples labeled corrupted.
    pub corruption: Mat64,
}

impl PenaltyGrid {
    /// First `λ` per `ρ` row where `fractions` reaches `level`; `∞` if never.
    fn onsets(&self, fractions: &Mat64, level: f64) -> Vec<f64> {
        (0..self.rhos.len())
            .map(|i| {
                fractions
                    .row(i)
                    .iter()
                    .position(|&f| f >= level)
                    .map_or(f64::INFINITY, |j| self.lambdas[j])
            })
            .collect()
    }

    pub fn activation_onsets(&self, level: f64) -> Vec<f64> {
        self.onsets(&self.activation, level)
    }

    pub fn corruption_onsets(&self, level: f64) -> Vec<f64> {
        self.onsets(&self.corruption, level)
    }
}

/// Penalize, steer and judge every sample on a `ρ × λ` grid. Rows run in
/// parallel.
pub fn penalty_grid(
    samples: &[SyntheticModel],
    v: &SteeringVector<f64>,
    v_d: &Vec64,
    spec: &GridSpec,
) -> Result<PenaltyGrid> {
    if !(spec.lambda_max > 0.0) {
        return Err(CrhError::InvalidArgument(format!(
            "lambda_max {} must be positive",
            spec.lambda_max
        )));
    }
    if spec.rho_steps < 2 || spec.lambda_steps < 2 {
        return Err(CrhError::InvalidArgument(
            "penalty grid needs at least 2 steps per axis".into(),
        ));
    }
    if samples.is_empty() {
        return Err(CrhError::InvalidArgument("no test samples".into()));
    }
    let rhos = spec.rhos();
    let lambdas = spec.lambdas();
    let total = samples.len() as f64;
    let rows: Vec<(Vec<f64>, Vec<f64>)> = rhos
        .par_iter()
        .map(|&rho| {
            let pv = apply_penalty(v, v_d, rho)?;
            let mut act = Vec::with_capacity(lambdas.len());
            let mut cor = Vec::with_capacity(lambdas.len());
            for &l in &lambdas {
                let (t, c) = label_counts(samples, &pv, l)?;
                act.push(t as f64 / total);
                cor.push(c as f64 / total);
            }
            Ok((act, cor))
        })
        .collect::<Result<_>>()?;
    let (act, cor): (Vec<Vec<f64>>, Vec<Vec<f64>>) = rows.into_iter().unzip();
    let (nr, nl) = (rhos.len(), lambdas.len());
    Ok(PenaltyGrid {
        rhos,
        lambdas,
        activation: Matrix::new(nr, nl, act.concat())?,
        corruption: Matrix::new(nr, nl, cor.concat())?,
    })
}

/// A synthetic Implication-1 setting: test samples sharing a concept
/// structure with jittered thresholds, and a steering vector whose
/// off-axis part both helps the target and leaves the concept span.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SteeringSetup {
    pub samples: usize,
    /// Target-aligned off-axis component, relative to `‖v_d‖`.
    pub helpful: f64,
    /// Out-of-span component, relative to `‖v_d‖`.
    pub off_span: f64,
    /// Relative half-width of the uniform threshold jitter.
    pub threshold_jitter: f64,
}

impl Default for SteeringSetup {
    fn default() -> Self {
        Self {
            samples: 32,
            helpful: 0.75,
            off_span: 1.0,
            threshold_jitter: 0.2,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SteeringScenario {
    pub samples: Vec<SyntheticModel>,
    pub v: SteeringVector<f64>,
    pub v_d: Vec64,
    /// Smallest `λ` at which the fully penalized vector activates every sample.
    pub full_penalty_reach: f64,
}

pub fn steering_scenario(scenario: &ScenarioConfig, setup: &SteeringSetup) -> Result<SteeringScenario> {
    if setup.samples == 0 || !(0.0..1.0).contains(&setup.threshold_jitter) {
        return Err(CrhError::InvalidArgument("invalid steering setup".into()));
    }
    let base = scenario.build()?;
    let model = &base.model;
    let v_d = model.v_d().clone();
    let axis = base.config.unit_axis()?;
    let target_perp = split_on_unit(model.basis.target_direction(), &axis).perp.normalized()?;
    let mut rng = seeded(scenario.seed, Stream::Samples);
    let off = (0..model.dim())
        .map(|k| {
            reject_from(
                &Vec64::basis(model.dim(), (k + scenario.seed as usize) % model.dim()),
                model.span_basis(),
            )
        })
        .find(|r| r.norm() > 1e-6)
        .ok_or_else(|| CrhError::Precondition("concept span fills the space; corruption is impossible".into()))?
        .normalized()?;
    let scale = v_d.norm();
    let mut v = v_d.clone();
    v.axpy(setup.helpful * scale, &target_perp);
    v.axpy(setup.off_span * scale, &off);
    let v = SteeringVector::new(v, Method::Diffmean, 0, "synthetic")?;
    let j = setup.threshold_jitter;
    let samples: Vec<SyntheticModel> = (0..setup.samples)
        .map(|_| {
            let fc = 1.0 + rng.random_range(-j..=j);
            let fx = 1.0 + rng.random_range(-j..=j);
            model.with_thresholds(model.tau_c * fc, model.tau_x * fx)
        })
        .collect::<Result<_>>()?;
    let axial_gain = v_d.dot(model.basis.target_direction());
    if !(axial_gain > 0.0) {
        return Err(CrhError::Precondition(
            "the difference vector does not raise the target concept".into(),
        ));
    }
    let tau_max = samples.iter().map(|m| m.tau_c).fold(0.0, f64::max);
    Ok(SteeringScenario {
        samples,
        v,
        v_d,
        full_penalty_reach: tau_max / axial_gain,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn steerability_examples() {
        let c = SuccessCurve {
            lambdas: vec![0.0, 0.5, 1.0],
            success_fraction: vec![0.0, 0.5, 1.0],
        };
        assert_abs_diff_eq!(steerability(&c, 2.0).unwrap().score, 0.5, epsilon = 1e-12);
        let flat = SuccessCurve {
            lambdas: vec![0.0, 1.0, 2.0],
            success_fraction: vec![0.3; 3],
        };
        assert_abs_diff_eq!(steerability(&flat, 1.0).unwrap().score, 0.0, epsilon = 1e-12);
        let d = SuccessCurve {
            lambdas: vec![0.0, 1.0, 2.0, 3.0],
            success_fraction: vec![0.0, 0.2, 0.6, 1.0],
        };
        assert_abs_diff_eq!(steerability(&d, 1.0).unwrap().score, 0.34, epsilon = 1e-12);
        let constant = SuccessCurve {
            lambdas: vec![1.0; 3],
            success_fraction: vec![0.0, 0.5, 1.0],
        };
        assert!(steerability(&constant, 1.0).is_err());
    }

    #[test]
    fn grid_shape_and_zero_column() {
        let s = steering_scenario(&ScenarioConfig::default(), &SteeringSetup::default()).unwrap();
        let spec = GridSpec {
            rho_steps: 25,
            lambda_steps: 25,
            lambda_max: 1.5 * s.full_penalty_reach,
        };
        let g = penalty_grid(&s.samples, &s.v, &s.v_d, &spec).unwrap();
        assert_eq!((g.activation.rows(), g.activation.cols()), (25, 25));
        for i in 0..25 {
            assert_eq!(g.activation.get(i, 0), 0.0);
            assert_eq!(g.corruption.get(i, 0), 0.0);
        }
        assert!(g
            .activation
            .data()
            .iter()
            .chain(g.corruption.data())
            .all(|f| (0.0..=1.0).contains(f)));
    }

    #[test]
    fn onset_reports_infinity() {
        let g = PenaltyGrid {
            rhos: vec![0.0, 1.0],
            lambdas: vec![0.0, 1.0, 2.0],
            activation: Matrix::new(2, 3, vec![0.0, 0.6, 1.0, 0.0, 0.0, 0.4]).unwrap(),
            corruption: Matrix::zeros(2, 3),
        };
        assert_eq!(g.activation_onsets(0.5), vec![1.0, f64::INFINITY]);
    }
}
