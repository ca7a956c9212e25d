// SPDX-License-Identifier: MIT OR Apache-2.0

//! Mixed-power correlation scan of steerability against the angle between
//! the steering vector and the difference vector.

use std::collections::BTreeMap;
use std::f64::consts::FRAC_PI_2;

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{CrhError, Result};
use crate::rng::{seeded, Stream};
use crate::stats::pearson;
use crate::Vec64;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanSample {
    pub concept: String,
    pub steerability: f64,
    pub v_norm: f64,
    pub v_d_norm: f64,
    /// Angle between the steering vector and `v_d`, radians.
    pub theta: f64,
}

impl ScanSample {
    /// Builds a sample from the vectors themselves.
    pub fn from_vectors(concept: impl Into<String>, steerability: f64, v: &Vec64, v_d: &Vec64) -> Result<Self> {
        let cos = v
            .cosine(v_d)
            .ok_or_else(|| CrhError::DegenerateAxis("zero steering or difference vector".into()))?;
        Ok(Self {
            concept: concept.into(),
            steerability,
            v_norm: v.norm(),
            v_d_norm: v_d.norm(),
            theta: cos.clamp(-1.0, 1.0).acos(),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScanNormalization {
    /// `St / ‖v_d‖^k`.
    #[default]
    DifferenceNorm,
    /// `St / ‖v‖^k`.
    SteeringNorm,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Aggregation {
    /// Average regressor and response per concept before correlating.
    #[default]
    PerConceptMean,
    PerSample,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScanConfig {
    pub k_grid: Vec<f64>,
    pub m_resolution: usize,
    pub normalization: ScanNormalization,
    pub aggregation: Aggregation,
}

impl Default for ScanConfig {
    fn default() -> Self {
        Self {
            k_grid: (1..=12).map(|i| 0.5 * i as f64).collect(),
            m_resolution: 64,
            normalization: ScanNormalization::default(),
            aggregation: Aggregation::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScanResult {
    pub k_grid: Vec<f64>,
    /// Best correlation per `k`; NaN where undefined.
    pub rho_k: Vec<f64>,
    pub p_values: Vec<f64>,
    pub best_m_per_k: Vec<f64>,
    /// `k` values whose correlation was undefined for every `m`.
    pub undefined: Vec<bool>,
    /// Samples whose angle was clamped into the open quadrant.
    pub clamped: usize,
}

impl ScanResult {
    /// Index of the largest defined `ρ_k`.
    pub fn peak(&self) -> Option<usize> {
        let mut best: Option<usize> = None;
        for (i, r) in self.rho_k.iter().enumerate() {
            if r.is_finite() && best.is_none_or(|b| *r > self.rho_k[b]) {
                best = Some(i);
            }
        }
        best
    }

    /// Non-decreasing up to the peak and non-increasing after it.
    pub fn is_unimodal(&self) -> bool {
        let Some(p) = self.peak() else {
            return false;
        };
        let r = &self.rho_k;
        r.iter().all(|x| x.is_finite())
            && r[..=p].windows(2).all(|w| w[1] >= w[0])
            && r[p..].windows(2).all(|w| w[1] <= w[0])
    }
}

const THETA_EPS: f64 = 1e-6;

/// Interior grid `k(j+1)/(res+1)`, `j = 0..res`.
pub fn m_grid(k: f64, resolution: usize) -> Vec<f64> {
    (0..resolution)
        .map(|j| k * (j + 1) as f64 / (resolution + 1) as f64)
        .collect()
}

pub fn correlation_scan(samples: &[ScanSample], cfg: &ScanConfig) -> Result<ScanResult> {
    if samples.len() < 3 {
        return Err(CrhError::Precondition(format!(
            "correlation scan needs >= 3 samples, got {}",
            samples.len()
        )));
    }
    if cfg.m_resolution == 0 || cfg.k_grid.iter().any(|k| !(*k > 0.0)) {
        return Err(CrhError::InvalidArgument(
            "k values must be positive and m_resolution >= 1".into(),
        ));
    }
    let mut clamped = 0;
    let thetas: Vec<f64> = samples
        .iter()
        .map(|s| {
            let t = s.theta.clamp(THETA_EPS, FRAC_PI_2 - THETA_EPS);
            if t != s.theta {
                clamped += 1;
            }
            t
        })
        .collect();
    if clamped > 0 {
        log::warn!("correlation scan: {clamped} angles clamped into (0, pi/2)");
    }
    // Group indices by concept in sorted order so sums are reproducible.
    let mut groups: BTreeMap<&str, Vec<usize>> = BTreeMap::new();
    for (i, s) in samples.iter().enumerate() {
        groups.entry(&s.concept).or_default().push(i);
    }
    let aggregate = |vals: &[f64]| -> Vec<f64> {
        match cfg.aggregation {
            Aggregation::PerSample => vals.to_vec(),
            Aggregation::PerConceptMean => groups
                .values()
                .map(|idx| idx.iter().map(|&i| vals[i]).sum::<f64>() / idx.len() as f64)
                .collect(),
        }
    };

    let mut out = ScanResult {
        k_grid: cfg.k_grid.clone(),
        rho_k: Vec::new(),
        p_values: Vec::new(),
        best_m_per_k: Vec::new(),
        undefined: Vec::new(),
        clamped,
    };
    for &k in &cfg.k_grid {
        let y: Vec<f64> = samples
            .iter()
            .map(|s| {
                let norm = match cfg.normalization {
                    ScanNormalization::DifferenceNorm => s.v_d_norm,
                    ScanNormalization::SteeringNorm => s.v_norm,
                };
                s.steerability / norm.powf(k)
            })
            .collect();
        let y = aggregate(&y);
        let mut best: Option<(f64, f64, f64)> = None;
        for m in m_grid(k, cfg.m_resolution) {
            let x: Vec<f64> = thetas.iter().map(|t| t.sin().powf(m) * t.cos().powf(k - m)).collect();
            if let Ok(stat) = pearson(&aggregate(&x), &y) {
                if best.is_none_or(|(r, _, _)| stat.r > r) {
                    best = Some((stat.r, stat.p_value, m));
                }
            }
        }
        match best {
            Some((r, p, m)) => {
                out.rho_k.push(r);
                out.p_values.push(p);
                out.best_m_per_k.push(m);
                out.undefined.push(false);
            }
            None => {
                log::warn!("correlation scan: undefined at k={k}");
                out.rho_k.push(f64::NAN);
                out.p_values.push(f64::NAN);
                out.best_m_per_k.push(f64::NAN);
                out.undefined.push(true);
            }
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PowerLawSpec {
    pub samples: usize,
    /// Exponent of `sin θ`.
    pub m: f64,
    /// Exponent of `cos θ`.
    pub n: f64,
    /// Relative multiplicative noise.
    pub noise: f64,
    pub scale: f64,
}

impl Default for PowerLawSpec {
    fn default() -> Self {
        Self {
            samples: 200,
            m: 2.0,
            n: 1.0,
            noise: 0.0,
            scale: 1.0,
        }
    }
}

/// Samples with `St = C ‖v_d‖^{m+n} sin^m θ cos^n θ (1 + σ ε)`, one concept
/// each, `‖v_d‖ ~ U(0.5, 2)`, `θ ~ U(0.1, 1.4)`, `‖v‖ = 1`.
pub fn power_law_samples(spec: &PowerLawSpec, seed: u64) -> Vec<ScanSample> {
    let mut rng = seeded(seed, Stream::Samples);
    (0..spec.samples)
        .map(|i| {
            let vd: f64 = rng.random_range(0.5..2.0);
            let theta: f64 = rng.random_range(0.1..1.4);
            let eps: f64 = StandardNormal.sample(&mut rng);
            let st = spec.scale
                * vd.powf(spec.m + spec.n)
                * theta.sin().powf(spec.m)
                * theta.cos().powf(spec.n)
                * (1.0 + spec.noise * eps);
            ScanSample {
                concept: format!("c{i:04}"),
                steerability: st,
                v_norm: 1.0,
                v_d_norm: vd,
                theta,
            }
        })
        .collect()
}
