// SPDX-License-Identifier: MIT OR Apache-2.0

//! Does similarity of difference vectors predict similar emergence strength?

use std::collections::BTreeMap;
use std::f64::consts::TAU;

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::Serialize;

use crate::error::Result;
use crate::rng::{seeded, Stream};
use crate::stats::{pearson, CorrStat};
use crate::Vec64;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TransferSample {
    pub concept: String,
    pub v_d: Vec64,
    /// `None` when the sample never activated within the sweep.
    pub lambda_star: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TransferPairs {
    pub sims: Vec<f64>,
    pub deltas: Vec<f64>,
    /// Absent with fewer than 3 pairs or zero variance.
    pub stat: Option<CorrStat<f64>>,
    pub excluded_zero_norm: usize,
    pub excluded_inactive: usize,
}

/// Pools within-concept pairs `i < j` (concepts in sorted order).
pub fn similarity_transfer(samples: &[TransferSample]) -> Result<TransferPairs> {
    let mut excluded_zero_norm = 0;
    let mut excluded_inactive = 0;
    let mut groups: BTreeMap<&str, Vec<(&Vec64, f64)>> = BTreeMap::new();
    for s in samples {
        let Some(l) = s.lambda_star else {
            excluded_inactive += 1;
            continue;
        };
        if !(s.v_d.norm() > 0.0) {
            excluded_zero_norm += 1;
            continue;
        }
        groups.entry(&s.concept).or_default().push((&s.v_d, l));
    }
    let mut sims = Vec::new();
    let mut deltas = Vec::new();
    for members in groups.values() {
        for (i, (vi, li)) in members.iter().enumerate() {
            for (vj, lj) in &members[i + 1..] {
                sims.push(vi.cosine(vj).unwrap_or(0.0));
                deltas.push((li - lj).abs());
            }
        }
    }
    let stat = pearson(&sims, &deltas).ok();
    Ok(TransferPairs {
        sims,
        deltas,
        stat,
        excluded_zero_norm,
        excluded_inactive,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, serde::Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct NullTransferSpec {
    pub concepts: usize,
    pub per_concept: usize,
    pub d: usize,
    /// Spread of per-sample difference vectors around their concept mean.
    pub spread: f64,
}

impl Default for NullTransferSpec {
    /// 10 concepts of 15 samples: 1050 within-concept pairs.
    fn default() -> Self {
        Self {
            concepts: 10,
            per_concept: 15,
            d: 32,
            spread: 0.5,
        }
    }
}

/// Samples whose sector phase, and hence emergence strength, is drawn
/// independently of their difference vectors.
pub fn null_transfer_samples(spec: &NullTransferSpec, seed: u64) -> Vec<TransferSample> {
    let mut rng = seeded(seed, Stream::Samples);
    let mut out = Vec::with_capacity(spec.concepts * spec.per_concept);
    for c in 0..spec.concepts {
        let center: Vec64 = (0..spec.d).map(|_| StandardNormal.sample(&mut rng)).collect();
        for _ in 0..spec.per_concept {
            let mut v = center.clone();
            for x in v.as_mut_slice() {
                let e: f64 = StandardNormal.sample(&mut rng);
                *x += spec.spread * e;
            }
            let phase: f64 = rng.random_range(0.0..TAU);
            out.push(TransferSample {
                concept: format!("concept{c:03}"),
                v_d: v,
                lambda_star: Some(1.0 + 0.5 * phase.cos()),
            });
        }
    }
    out
}
