// SPDX-License-Identifier: MIT OR Apache-2.0

//! Worked examples checked against independent computations: quadrature,
//! hand-rolled elimination, dense scans and closed forms written out here
//! rather than reused from the library.

use std::f64::consts::{PI, TAU};

use crh_core::implications::{
    correlation_scan, judge, power_law_samples, steerability, OutcomeLabel, PowerLawSpec, ScanConfig, SuccessCurve,
};
use crh_core::linalg::{axis_decompose, pca, Matrix};
use crh_core::oracle::FnOracle;
use crh_core::probing::{
    optimize_budgeted, phase_extremes, phase_grid, radius_grid, sweep, BudgetSchedule, CylinderFrame, SweepSpec,
};
use crh_core::stats::{correlation_p_value, line_fit, pearson};
use crh_core::steering::{build, ActivationSet, BuildOptions, Method};
use crh_core::synthetic::{
    compose, gen_basis, interference_phasor, latent_projector, lemma1_witness, normal_plane, sector_from_parts,
    theorem1_check, theorem2_counterexample, BasisSpec, ConceptBasis, ScenarioConfig, SectorLabel, SectorRule,
};
use crh_core::Vec64;

fn spec(d: usize, n: usize, seed: u64) -> BasisSpec {
    BasisSpec {
        d,
        n,
        seed,
        coherence: 0.0,
        orthogonalize: false,
        target: 0,
    }
}

fn v(xs: &[f64]) -> Vec64 {
    Vec64::from(xs.to_vec())
}

#[test]
fn hand_projection() {
    let s = axis_decompose(&v(&[3.0, 4.0]), &v(&[1.0, 0.0])).unwrap();
    assert_eq!(s.axial, 3.0);
    assert_eq!(s.perp.as_slice(), &[0.0, 4.0]);
}

#[test]
fn planted_spike_ratio_matches_brute_force_covariance() {
    // ±3 on the first axis, ±1 on the second: covariance diag(12, 4/3)
    let rows = vec![
        v(&[3.0, 1.0, 0.0, 0.0, 0.0]),
        v(&[-3.0, -1.0, 0.0, 0.0, 0.0]),
        v(&[3.0, -1.0, 0.0, 0.0, 0.0]),
        v(&[-3.0, 1.0, 0.0, 0.0, 0.0]),
    ];
    let mut cov = [[0.0; 5]; 5];
    for r in &rows {
        for i in 0..5 {
            for j in 0..5 {
                cov[i][j] += r[i] * r[j] / 3.0;
            }
        }
    }
    // power iteration on the explicit covariance
    let mut x = [1.0, 0.3, 0.2, 0.1, 0.05];
    let mut lead = 0.0;
    for _ in 0..200 {
        let y: Vec<f64> = (0..5).map(|i| (0..5).map(|j| cov[i][j] * x[j]).sum()).collect();
        let n = y.iter().map(|a| a * a).sum::<f64>().sqrt();
        lead = n;
        for i in 0..5 {
            x[i] = y[i] / n;
        }
    }
    let trace: f64 = (0..5).map(|i| cov[i][i]).sum();
    let r = pca(&Matrix::from_rows(&rows).unwrap(), 2).unwrap();
    assert!((lead / trace - 0.9).abs() < 1e-12);
    assert!((r.explained_variance_ratio[0] - lead / trace).abs() < 1e-10);
}

/// Composite Simpson quadrature of the Student-t density.
fn t_tail_by_quadrature(t: f64, df: f64) -> f64 {
    let ln_c = libm_lgamma((df + 1.0) / 2.0) - libm_lgamma(df / 2.0) - 0.5 * (df * PI).ln();
    let density = |x: f64| (ln_c - (df + 1.0) / 2.0 * (1.0 + x * x / df).ln()).exp();
    let n = 200_000;
    let h = t / n as f64;
    let mut s = density(0.0) + density(t);
    for i in 1..n {
        s += density(i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 };
    }
    let central = s * h / 3.0;
    1.0 - 2.0 * central
}

/// ln Γ for integer and half-integer arguments, from the recurrence.
fn libm_lgamma(z: f64) -> f64 {
    let mut acc = 0.0;
    let mut x = z;
    while x > 1.0 {
        x -= 1.0;
        acc += x.ln();
    }
    if (x - 0.5).abs() < 1e-12 {
        acc + 0.5 * PI.ln()
    } else {
        acc
    }
}

#[test]
fn correlation_p_value_matches_t_quadrature() {
    let (r, n) = (0.576, 12);
    let t = r * ((n - 2) as f64).sqrt() / (1.0 - r * r).sqrt();
    let oracle = t_tail_by_quadrature(t, (n - 2) as f64);
    let p = correlation_p_value(r, n);
    assert!((p - oracle).abs() < 1e-8, "{p} vs {oracle}");
    assert!((p - 0.0499).abs() < 5e-4, "{p}");
}

#[test]
fn pearson_on_small_sample_matches_definition() {
    let x = [1.0, 2.0, 4.0, 7.0, 11.0];
    let y = [2.0, 1.0, 5.0, 6.0, 12.0];
    let mx = x.iter().sum::<f64>() / 5.0;
    let my = y.iter().sum::<f64>() / 5.0;
    let sxy: f64 = x.iter().zip(&y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    let syy: f64 = y.iter().map(|b| (b - my).powi(2)).sum();
    assert!((pearson(&x, &y).unwrap().r - sxy / (sxx * syy).sqrt()).abs() < 1e-14);
}

#[test]
fn line_fit_normal_equations() {
    let fit = line_fit(&[0.0, 1.0, 2.0, 3.0], &[0.0, 1.0, 1.0, 2.0]).unwrap();
    // [Σx² Σx; Σx n][a b]ᵀ = [Σxy Σy]ᵀ  with Σx=6, Σx²=14, Σy=4, Σxy=9
    let det: f64 = 14.0 * 4.0 - 6.0 * 6.0;
    let a: f64 = (9.0 * 4.0 - 6.0 * 4.0) / det;
    let b: f64 = (14.0 * 4.0 - 6.0 * 9.0) / det;
    assert!((fit.slope - a).abs() < 1e-12 && (a - 0.6).abs() < 1e-12);
    assert!((fit.intercept - b).abs() < 1e-12 && (b - 0.1).abs() < 1e-12);
}

#[test]
fn basis_generation_is_bit_identical() {
    let a = gen_basis(&spec(16, 24, 7)).unwrap();
    let b = gen_basis(&spec(16, 24, 7)).unwrap();
    let bits = |x: &ConceptBasis| -> Vec<u64> {
        x.directions()
            .iter()
            .flat_map(|d| d.iter().map(|v| v.to_bits()))
            .collect()
    };
    assert_eq!(bits(&a), bits(&b));
}

#[test]
fn compose_matches_explicit_matrix_vector_product() {
    let basis = gen_basis(&spec(8, 12, 3)).unwrap();
    let alpha: Vec<f64> = (0..12).map(|i| ((i * 37 % 11) as f64 - 5.0) / 4.0).collect();
    let c = compose(&basis, &alpha).unwrap();
    for row in 0..8 {
        let mut acc = 0.0;
        for (col, a) in alpha.iter().enumerate() {
            acc += basis.direction(col)[row] * a;
        }
        assert!((c.v_d[row] - acc).abs() < 1e-12);
    }
}

#[test]
fn two_concept_plane_contains_the_span() {
    // two concepts in R³: their span contains the axis, so e1 lies in the span
    // and e2 has to be completed outside it
    let a1 = v(&[1.0, 0.0, 0.0]);
    let a2 = v(&[0.6, 0.8, 0.0]);
    let basis = ConceptBasis::new(vec![a1, a2], 0).unwrap();
    let c = compose(&basis, &[1.0, 0.5]).unwrap();
    let p = normal_plane(&c, &basis).unwrap();
    assert!(p.e1[2].abs() < 1e-8 && p.axis[2].abs() < 1e-8);
    assert!(p.e2_completed);
    assert!((p.e2[2].abs() - 1.0).abs() < 1e-8);
}

#[test]
fn in_plane_parts_sum_to_zero() {
    let basis = gen_basis(&spec(8, 12, 11)).unwrap();
    let alpha: Vec<f64> = (0..12).map(|i| (i as f64 * 0.7).sin()).collect();
    let c = compose(&basis, &alpha).unwrap();
    let p = normal_plane(&c, &basis).unwrap();
    // project each concept's raw contribution independently
    let (mut sx, mut sy) = (0.0, 0.0);
    for (a, dir) in alpha.iter().zip(basis.directions()) {
        let contrib = dir.scaled(*a);
        sx += contrib.dot(&p.e1);
        sy += contrib.dot(&p.e2);
    }
    assert!(sx.hypot(sy) < 1e-8 * c.v_d.norm());
}

#[test]
fn antitarget_is_low_sensitivity() {
    // target part (1, 0), other part (-1, 0) by balance
    let parts = [[1.0, 0.0], [-1.0, 0.0], [0.0, 0.5]];
    let r = sector_from_parts(&parts, 0, [-1.0, 0.0], SectorRule::Signed).unwrap();
    assert!(r.beta_c < 0.0);
    assert!(r.beta_c < r.beta_others_sum);
    assert_eq!(r.label, SectorLabel::LowSensitivity);
}

#[test]
fn phasor_sum_matches_sampled_cosines() {
    let amps = [0.7, 1.3, 0.4];
    let deltas = [0.2, 2.9, 4.4];
    let (b, delta) = interference_phasor(&amps, &deltas).unwrap();
    for k in 0..360 {
        let phi = k as f64 * TAU / 360.0;
        let direct: f64 = amps.iter().zip(&deltas).map(|(a, d)| a * (phi - d).cos()).sum();
        assert!((direct - b * (phi - delta).cos()).abs() < 1e-12);
    }
}

/// Plain Gaussian elimination with partial pivoting to reduced row echelon
/// form; returns the rank.
fn rref_rank(mut a: Vec<Vec<f64>>) -> usize {
    let (rows, cols) = (a.len(), a[0].len());
    let mut rank = 0;
    for c in 0..cols {
        let Some(p) = (rank..rows).max_by(|&i, &j| a[i][c].abs().total_cmp(&a[j][c].abs())) else {
            break;
        };
        if a[p][c].abs() < 1e-10 {
            continue;
        }
        a.swap(rank, p);
        let pivot = a[rank].clone();
        for (r, row) in a.iter_mut().enumerate() {
            if r != rank {
                let f = row[c] / pivot[c];
                for (x, y) in row.iter_mut().zip(&pivot) {
                    *x -= f * y;
                }
            }
        }
        rank += 1;
        if rank == rows {
            break;
        }
    }
    rank
}

#[test]
fn lemma1_kernel_against_elimination() {
    let basis = gen_basis(&spec(16, 24, 5)).unwrap();
    let alpha: Vec<f64> = (0..24).map(|i| (i as f64).cos()).collect();
    let c = compose(&basis, &alpha).unwrap();
    let w = lemma1_witness(&basis, &c).unwrap();
    let a: Vec<Vec<f64>> = (0..16)
        .map(|r| (0..24).map(|k| basis.direction(k)[r]).collect())
        .collect();
    assert_eq!(rref_rank(a.clone()), w.rank);
    let residual: f64 = a
        .iter()
        .map(|row| row.iter().zip(&w.gamma).map(|(x, g)| x * g).sum::<f64>().powi(2))
        .sum::<f64>()
        .sqrt();
    assert!(residual <= 1e-9);
    assert!(w.kernel_dim >= 8);
}

#[test]
fn theorem1_against_dense_products() {
    let basis = gen_basis(&spec(10, 15, 2)).unwrap();
    let alpha: Vec<f64> = (0..15).map(|i| 0.3 + (i as f64 * 1.1).sin()).collect();
    let c = compose(&basis, &alpha).unwrap();
    let axis = c.unit_axis().unwrap();
    let p = latent_projector(&axis, &basis.directions()[..4]);
    let x = v(&[0.3, -1.0, 2.0, 0.5, 0.0, 1.5, -0.7, 0.2, 0.9, -1.2]);
    let r = theorem1_check(&c, &p, &x).unwrap();
    // Q = I − aaᵀ, written out
    let q: Vec<Vec<f64>> = (0..10)
        .map(|i| {
            (0..10)
                .map(|j| f64::from(u8::from(i == j)) - axis[i] * axis[j])
                .collect()
        })
        .collect();
    let px: Vec<f64> = (0..10).map(|i| (0..10).map(|j| p.get(i, j) * x[j]).sum()).collect();
    let qx: Vec<f64> = (0..10).map(|i| (0..10).map(|j| q[i][j] * x[j]).sum()).collect();
    let lhs: f64 = px.iter().zip(&qx).map(|(a, b)| 4.0 * a * b).sum();
    let f2: f64 = x.iter().zip(&px).map(|(a, b)| a * b).sum();
    assert!((r.lhs - lhs).abs() <= 1e-10 * lhs.abs());
    assert!((lhs - 4.0 * f2).abs() <= 1e-8 * lhs.abs());
    assert!(lhs >= 0.0);
}

#[test]
fn minimal_counterexample_by_direct_evaluation() {
    let w = theorem2_counterexample(3, 4, 0).unwrap();
    // recompute v_d for both configurations by hand
    let dv: f64 = (0..3)
        .map(|row| {
            (0..4)
                .map(|k| w.basis.direction(k)[row] * (w.config_a.alpha[k] - w.config_b.alpha[k]))
                .sum::<f64>()
                .powi(2)
        })
        .sum::<f64>()
        .sqrt();
    assert!(dv <= 1e-9);
    assert!(w.f_a.signum() == -w.f_b.signum());
}

#[test]
fn probe_finds_separating_axis() {
    let pos: Vec<Vec64> = (0..8)
        .map(|i| v(&[1.5 + 0.1 * i as f64, (i as f64 * 0.9).sin()]))
        .collect();
    let neg: Vec<Vec64> = (0..8)
        .map(|i| v(&[-1.5 - 0.1 * i as f64, (i as f64 * 1.7).cos()]))
        .collect();
    let set = ActivationSet::new(
        Matrix::from_rows(&pos).unwrap(),
        Matrix::from_rows(&neg).unwrap(),
        0,
        "x",
    )
    .unwrap();
    let sv = build(&set, Method::Probe, &BuildOptions::default()).unwrap();
    let angle = (sv.v[0] / sv.norm).acos().to_degrees();
    assert!(angle < 5.0, "{angle} degrees");
}

#[test]
fn optimizer_reaches_closed_form_minimum() {
    let target = v(&[1.0, -2.0, 0.5]);
    let t2 = target.clone();
    let oracle = QuadOracle(t2);
    let schedule = BudgetSchedule {
        weights: vec![0.5, 1.0, 1.5, 2.0],
        iterations: 200,
        learning_rate: 0.1,
    };
    let o = optimize_budgeted(&oracle, &target, &schedule).unwrap();
    let last = o.vectors.row_vector(3);
    assert!((&last - &target).norm() < 1e-3);
    assert!(o.losses[3] < 1e-6);
}

struct QuadOracle(Vec64);

impl crh_core::oracle::LossOracle for QuadOracle {
    fn dim(&self) -> usize {
        self.0.dim()
    }
    fn loss(&self, x: &Vec64) -> crh_core::Result<f64> {
        Ok((x - &self.0).norm_sq())
    }
    fn loss_and_grad(&self, x: &Vec64) -> crh_core::Result<(f64, Vec64)> {
        let diff = x - &self.0;
        Ok((diff.norm_sq(), diff.scaled(2.0)))
    }
}

#[test]
fn phase_extremes_follow_dense_scan() {
    let delta_c = 0.7_f64;
    let delta_b = 2.3_f64;
    let mu = 0.3;
    let frame = CylinderFrame::new(
        v(&[0.0; 3]),
        v(&[1.0, 0.0, 0.0]),
        v(&[0.0, 1.0, 0.0]),
        v(&[0.0, 0.0, 1.0]),
    )
    .unwrap();
    let goal = v(&[1.0, delta_c.cos(), delta_c.sin()]);
    let interferer = v(&[0.0, delta_b.cos(), delta_b.sin()]);
    let loss = |x: &Vec64| (x - &goal).norm_sq() + mu * x.dot(&interferer).powi(2);
    let oracle = FnOracle::new(3, loss);
    let spec = SweepSpec {
        axial_positions: vec![0.25, 0.5, 0.75, 1.0],
        phases: phase_grid(30),
        radii: radius_grid(5, 1.0),
        with_origin: true,
    };
    let grid = sweep(&oracle, &frame, &spec).unwrap();
    let e = phase_extremes(&grid).unwrap();
    let mean_at = |phi: f64| -> f64 {
        let mut s = 0.0;
        for &t in &spec.axial_positions {
            for &rho in &spec.radii {
                s += loss(&frame.point(t, phi, rho, true));
            }
        }
        s
    };
    let dense: Vec<f64> = (0..3600).map(|k| mean_at(k as f64 * TAU / 3600.0)).collect();
    let argmin = dense.iter().enumerate().min_by(|a, b| a.1.total_cmp(b.1)).unwrap().0 as f64 * TAU / 3600.0;
    let argmax = dense.iter().enumerate().max_by(|a, b| a.1.total_cmp(b.1)).unwrap().0 as f64 * TAU / 3600.0;
    let circ = |a: f64, b: f64| ((a - b).rem_euclid(TAU)).min((b - a).rem_euclid(TAU));
    let half_step = PI / 30.0 + 1e-9;
    assert!(circ(e.min_phase, argmin) <= half_step, "{} vs {argmin}", e.min_phase);
    assert!(circ(e.max_phase, argmax) <= half_step, "{} vs {argmax}", e.max_phase);
    assert!(circ(argmin, delta_c) < 0.35);
    assert!(circ(argmax, delta_c + PI) < 0.35);
}

#[test]
fn monotone_two_sector_trajectories() {
    // loss falls along the axis in one half-plane and rises in the other
    let frame = CylinderFrame::new(
        v(&[0.0; 3]),
        v(&[1.0, 0.0, 0.0]),
        v(&[0.0, 1.0, 0.0]),
        v(&[0.0, 0.0, 1.0]),
    )
    .unwrap();
    let oracle = FnOracle::new(3, |x: &Vec64| 2.0 - x[1] * x[0] + 0.1 * x[2]);
    let spec = SweepSpec {
        axial_positions: (0..6).map(|i| i as f64 * 0.4).collect(),
        phases: phase_grid(30),
        radii: radius_grid(5, 1.0),
        with_origin: true,
    };
    let e = phase_extremes(&sweep(&oracle, &frame, &spec).unwrap()).unwrap();
    assert!(e.min_trajectory.windows(2).all(|w| w[1] <= w[0] + 1e-12));
    assert!(e.max_trajectory.windows(2).all(|w| w[1] >= w[0] - 1e-12));
}

#[test]
fn off_span_state_is_corrupted() {
    let sc = ScenarioConfig {
        d: 10,
        n: 3,
        ..ScenarioConfig::default()
    }
    .build()
    .unwrap();
    let m = &sc.model;
    // orthogonal complement by explicit Gram–Schmidt against the concepts
    let mut u = v(&[1.0, -1.0, 0.5, 0.3, 0.0, 2.0, -0.2, 0.1, 0.7, -0.4]);
    let mut q: Vec<Vec64> = Vec::new();
    for a in m.basis.directions() {
        let mut w = a.clone();
        for b in &q {
            w.axpy(-w.dot(b), b);
        }
        q.push(w.normalized().unwrap());
    }
    for b in &q {
        u.axpy(-u.dot(b), b);
    }
    let u = u.normalized().unwrap();
    let mut state = m.origin.clone();
    state.axpy(m.tau_x + 1.0, &u);
    assert_eq!(judge(m, &state), OutcomeLabel::Corrupted);
}

#[test]
fn steerability_normal_equations() {
    let curve = SuccessCurve {
        lambdas: vec![0.0, 1.0, 2.0, 3.0],
        success_fraction: vec![0.0, 0.2, 0.6, 1.0],
    };
    // slope = Σ(x−x̄)(y−ȳ)/Σ(x−x̄)² = 1.7/5
    let s = steerability(&curve, 1.0).unwrap();
    assert!((s.fit.slope - 0.34).abs() < 1e-12);
    assert!((s.score - 0.34).abs() < 1e-12);
}

#[test]
fn noiseless_power_law_is_recovered() {
    let r = correlation_scan(&power_law_samples(&PowerLawSpec::default(), 3), &ScanConfig::default()).unwrap();
    let p = r.peak().unwrap();
    assert_eq!(r.k_grid[p], 3.0);
    assert!(r.rho_k[p] >= 0.999);
    assert!((r.best_m_per_k[p] - 2.0).abs() <= 0.25);
}
