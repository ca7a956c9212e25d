// SPDX-License-Identifier: MIT OR Apache-2.0

//! Seeded batches of the theory checks, each reduced to worst-case errors
//! and a pass/fail status.

use std::collections::BTreeMap;

use rand::{Rng, RngCore};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::Result;
use crate::rng::{seeded, Stream};
use crate::synthetic::gaussian_unit;
use crate::synthetic::{
    compose, gen_basis, latent_projector, lemma1_witness, normal_plane, split_concepts, theorem1_check,
    theorem2_counterexample, BasisSpec,
};

pub const THEOREM1_IDENTITY_TOL: f64 = 1e-8;
pub const THEOREM1_GRAD_TOL: f64 = 1e-5;
pub const LEMMA1_TOL: f64 = 1e-9;
pub const THEOREM2_TOL: f64 = 1e-9;
pub const THEOREM2_MARGIN: f64 = 1e-6;
pub const BALANCE_TOL: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckReport {
    pub name: String,
    pub instances: usize,
    pub failures: usize,
    /// Worst observed value of each monitored quantity.
    pub worst: BTreeMap<String, f64>,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TheoryReport {
    pub checks: Vec<CheckReport>,
    pub all_passed: bool,
}

/// Per-instance outcome: whether it passed and the metrics to fold.
type Outcome = (bool, Vec<(&'static str, f64)>);

fn fold(name: &str, outcomes: Vec<Outcome>, maximize: &[&str]) -> CheckReport {
    let mut worst: BTreeMap<String, f64> = BTreeMap::new();
    let mut failures = 0;
    for (ok, metrics) in &outcomes {
        failures += usize::from(!ok);
        for (k, v) in metrics {
            let larger_is_worse = maximize.contains(k);
            worst
                .entry(k.to_string())
                .and_modify(|w| {
                    *w = if larger_is_worse { w.max(*v) } else { w.min(*v) };
                })
                .or_insert(*v);
        }
    }
    CheckReport {
        name: name.into(),
        instances: outcomes.len(),
        failures,
        worst,
        passed: failures == 0 && !outcomes.is_empty(),
    }
}

fn sub_seeds(seed: u64, salt: u64, count: usize) -> Vec<u64> {
    let mut rng = seeded(seed ^ salt, Stream::Theory);
    (0..count).map(|_| rng.next_u64()).collect()
}

fn random_alpha(rng: &mut impl Rng, n: usize) -> Vec<f64> {
    (0..n).map(|_| rng.random_range(-1.0..1.0)).collect()
}

fn basis(d: usize, n: usize, seed: u64) -> Result<crate::synthetic::ConceptBasis> {
    gen_basis(&BasisSpec {
        d,
        n,
        seed,
        coherence: 0.0,
        orthogonalize: false,
        target: 0,
    })
}

/// Gradient identity with `n = 1.5 d` concepts; `P` projects onto the
/// axis-free span of a random leading subset of concepts.
pub fn theorem1_batch(dims: &[usize], instances: usize, seed: u64) -> CheckReport {
    let outcomes = sub_seeds(seed, 1, instances)
        .into_par_iter()
        .enumerate()
        .map(|(i, s)| -> Outcome {
            let d = dims[i % dims.len()];
            let n = (3 * d).div_ceil(2);
            let run = || -> Result<Outcome> {
                let b = basis(d, n, s)?;
                let mut rng = seeded(s, Stream::Samples);
                let config = compose(&b, &random_alpha(&mut rng, n))?;
                let k = rng.random_range(1..=n);
                let p = latent_projector(&config.unit_axis()?, &b.directions()[..k]);
                let v = gaussian_unit(&mut rng, d).scaled(rng.random_range(0.1..10.0));
                let r = theorem1_check(&config, &p, &v)?;
                let id = r.identity_rel_err();
                let grad = r.grad_f_rel_err.max(r.grad_g_rel_err);
                let nonneg = r.lhs >= -1e-12 * v.norm_sq();
                let ok = id <= THEOREM1_IDENTITY_TOL && grad <= THEOREM1_GRAD_TOL && nonneg;
                Ok((
                    ok,
                    vec![("identity_rel_err", id), ("grad_rel_err", grad), ("min_lhs", r.lhs)],
                ))
            };
            run().unwrap_or((false, vec![]))
        })
        .collect();
    fold(
        "theorem1_gradient_identity",
        outcomes,
        &["identity_rel_err", "grad_rel_err"],
    )
}

/// Kernel witnesses for `n > d`.
pub fn lemma1_batch(instances: usize, seed: u64) -> CheckReport {
    let outcomes = sub_seeds(seed, 2, instances)
        .into_par_iter()
        .map(|s| -> Outcome {
            let run = || -> Result<Outcome> {
                let mut rng = seeded(s, Stream::Samples);
                let d = rng.random_range(2..=12);
                let n = rng.random_range(d + 1..=2 * d + 2);
                let b = basis(d, n, s)?;
                let config = compose(&b, &random_alpha(&mut rng, n))?;
                let w = lemma1_witness(&b, &config)?;
                let rel = w.delta_v_d / config.v_d.norm().max(f64::MIN_POSITIVE);
                let ok = w.kernel_dim >= n - d && rel <= LEMMA1_TOL;
                let slack = w.kernel_dim as f64 - (n - d) as f64;
                Ok((ok, vec![("delta_v_d_rel", rel), ("kernel_dim_slack", slack)]))
            };
            run().unwrap_or((false, vec![]))
        })
        .collect();
    fold("lemma1_non_identifiability", outcomes, &["delta_v_d_rel"])
}

/// Sign-flip counterexamples for `d` cycling through `3..=16`.
pub fn theorem2_batch(seeds: usize, seed: u64) -> CheckReport {
    let outcomes = (0..seeds)
        .into_par_iter()
        .map(|i| -> Outcome {
            let d = 3 + i % 14;
            let n = d + 1 + (i / 14) % 4;
            match theorem2_counterexample(d, n, seed.wrapping_add(i as u64)) {
                Ok(w) => {
                    let margin = w.f_a.min(-w.f_b);
                    let ok = w.delta_v_d <= THEOREM2_TOL && margin >= THEOREM2_MARGIN;
                    (
                        ok,
                        vec![
                            ("delta_v_d", w.delta_v_d),
                            ("sign_margin", margin),
                            ("attempts", w.attempts as f64),
                        ],
                    )
                }
                Err(e) => {
                    log::warn!("theorem2 seed {i}: {e}");
                    (false, vec![])
                }
            }
        })
        .collect();
    fold("theorem2_counterexample", outcomes, &["delta_v_d", "attempts"])
}

/// Axial sum, perpendicular cancellation, and in-plane cancellation.
pub fn balance_batch(instances: usize, seed: u64) -> CheckReport {
    let outcomes = sub_seeds(seed, 4, instances)
        .into_par_iter()
        .map(|s| -> Outcome {
            let run = || -> Result<Outcome> {
                let mut rng = seeded(s, Stream::Samples);
                let d = rng.random_range(3..=32);
                let n = rng.random_range(2..=2 * d);
                let b = basis(d, n, s)?.with_target(rng.random_range(0..n))?;
                let config = compose(&b, &random_alpha(&mut rng, n))?;
                let norm = config.v_d.norm();
                let split = split_concepts(&config, &b)?;
                let axial = (split.axial_sum() - norm).abs() / norm;
                let perp = split.perp_sum().norm() / norm;
                let plane = normal_plane(&config, &b)?;
                let [x, y] = plane.parts_sum();
                let inplane = x.hypot(y) / norm;
                let ok = axial <= BALANCE_TOL && perp <= BALANCE_TOL && inplane <= BALANCE_TOL;
                Ok((
                    ok,
                    vec![("axial_rel", axial), ("perp_rel", perp), ("in_plane_rel", inplane)],
                ))
            };
            run().unwrap_or((false, vec![]))
        })
        .collect();
    fold(
        "balance_identities",
        outcomes,
        &["axial_rel", "perp_rel", "in_plane_rel"],
    )
}

pub fn verify_theory(
    dims: &[usize],
    theorem1: usize,
    lemma1: usize,
    theorem2: usize,
    balance: usize,
    seed: u64,
) -> TheoryReport {
    let checks = vec![
        theorem1_batch(dims, theorem1, seed),
        lemma1_batch(lemma1, seed),
        theorem2_batch(theorem2, seed),
        balance_batch(balance, seed),
    ];
    let all_passed = checks.iter().all(|c| c.passed);
    TheoryReport { checks, all_passed }
}
