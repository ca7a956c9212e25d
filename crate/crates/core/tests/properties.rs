// SPDX-License-Identifier: MIT OR Apache-2.0

use crh_core::implications::{
    correlation_scan, judge, penalty_grid, power_law_samples, similarity_transfer, steering_scenario, GridSpec,
    OutcomeLabel, PowerLawSpec, ScanConfig, ScanSample, SteeringSetup, TransferSample,
};
use crh_core::io::{decode_actv, encode_actv, fmt_f64, ActvHeader, Role};
use crh_core::linalg::{null_space, pca, split_on_unit, Matrix};
use crh_core::probing::{
    optimize_budgeted, phase_grid, radius_grid, sweep, BudgetSchedule, CylinderFrame, ProbeGrid, SweepSpec,
};
use crh_core::stats::{line_fit, pearson};
use crh_core::steering::{apply_penalty, build, ActivationSet, BuildOptions, Method, SteeringVector};
use crh_core::synthetic::{
    compose, gen_basis, latent_projector, lemma1_witness, normal_plane, sector, split_concepts, theorem1_check,
    theorem2_counterexample, BasisSpec, ScenarioConfig, SectorRule,
};
use crh_core::Vec64;
use proptest::prelude::*;

fn vec_of(d: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-5.0..5.0f64, d)
}

fn nonzero(d: usize) -> impl Strategy<Value = Vec64> {
    vec_of(d)
        .prop_filter("nonzero", |v| v.iter().map(|x| x * x).sum::<f64>() > 1e-6)
        .prop_map(Vec64::from)
}

fn basis(d: usize, n: usize, seed: u64, target: usize) -> crh_core::synthetic::ConceptBasis {
    gen_basis(&BasisSpec {
        d,
        n,
        seed,
        coherence: 0.0,
        orthogonalize: false,
        target,
    })
    .unwrap()
}

prop_compose! {
    fn dims()(d in 3usize..12)(d in Just(d), n in 2..=2 * d) -> (usize, usize) { (d, n) }
}

prop_compose! {
    fn config_case()((d, n) in dims(), seed in any::<u64>())
        (d in Just(d), n in Just(n), seed in Just(seed), t in 0..n, alpha in prop::collection::vec(-1.0..1.0f64, n))
        -> (usize, usize, u64, usize, Vec<f64>) { (d, n, seed, t, alpha) }
}

// ----------------------------------------------------------------- geometry

proptest! {
    #[test]
    fn split_reconstructs_and_is_pythagorean(v in nonzero(7), axis in nonzero(7)) {
        let u = axis.normalized().unwrap();
        let s = split_on_unit(&v, &u);
        let mut back = u.scaled(s.axial);
        back.axpy(1.0, &s.perp);
        prop_assert!((&back - &v).norm() <= 1e-9 * v.norm());
        let lhs = s.axial * s.axial + s.perp.norm_sq();
        prop_assert!((lhs - v.norm_sq()).abs() <= 1e-8 * v.norm_sq());
    }

    #[test]
    fn pca_of_centered_rank_one_data(dir in nonzero(5), coeffs in prop::collection::vec(-3.0..3.0f64, 3..10)) {
        let mean = coeffs.iter().sum::<f64>() / coeffs.len() as f64;
        prop_assume!(coeffs.iter().any(|c| (c - mean).abs() > 1e-3));
        let rows: Vec<Vec64> = coeffs.iter().map(|c| dir.scaled(c - mean)).collect();
        let r = pca(&Matrix::from_rows(&rows).unwrap(), 1).unwrap();
        prop_assert!((r.explained_variance_ratio[0] - 1.0).abs() <= 1e-10);
    }

    #[test]
    fn pearson_affine_invariance(
        xy in prop::collection::vec((-10.0..10.0f64, -10.0..10.0f64), 4..40),
        a in 0.1..10.0f64,
        b in -10.0..10.0f64,
    ) {
        let (x, y): (Vec<f64>, Vec<f64>) = xy.into_iter().unzip();
        let Ok(base) = pearson(&x, &y) else { return Ok(()) };
        let up: Vec<f64> = x.iter().map(|v| a * v + b).collect();
        let down: Vec<f64> = x.iter().map(|v| -a * v + b).collect();
        prop_assert!((pearson(&up, &y).unwrap().r - base.r).abs() <= 1e-12);
        prop_assert!((pearson(&down, &y).unwrap().r + base.r).abs() <= 1e-12);
    }

    #[test]
    fn line_fit_residual_is_orthogonal_to_x(xy in prop::collection::vec((-10.0..10.0f64, -10.0..10.0f64), 3..30)) {
        let (x, y): (Vec<f64>, Vec<f64>) = xy.into_iter().unzip();
        let Ok(fit) = line_fit(&x, &y) else { return Ok(()) };
        let dot: f64 = x.iter().zip(&y).map(|(xi, yi)| (yi - fit.predict(*xi)) * xi).sum();
        let scale: f64 = x.iter().zip(&y).map(|(a, b)| (a * b).abs()).sum::<f64>().max(1.0);
        prop_assert!(dot.abs() <= 1e-8 * scale);
    }
}

// ---------------------------------------------------------------- synthetic

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn balance_identities((d, n, seed, t, alpha) in config_case()) {
        let b = basis(d, n, seed, t);
        let c = compose(&b, &alpha).unwrap();
        prop_assume!(!c.is_degenerate());
        let norm = c.v_d.norm();
        let s = split_concepts(&c, &b).unwrap();
        prop_assert!((s.axial_sum() - norm).abs() <= 1e-8 * norm);
        prop_assert!(s.perp_sum().norm() <= 1e-8 * norm);
        if let Ok(p) = normal_plane(&c, &b) {
            let [x, y] = p.parts_sum();
            prop_assert!(x.hypot(y) <= 1e-8 * norm);
        }
    }

    #[test]
    fn theorem1_identity_holds((d, n, seed, t, alpha) in config_case(), v in vec_of(11), k in 1usize..6) {
        let b = basis(d, n, seed, t);
        let c = compose(&b, &alpha).unwrap();
        prop_assume!(!c.is_degenerate());
        let p = latent_projector(&c.unit_axis().unwrap(), &b.directions()[..k.min(n)]);
        let v = Vec64::from(v[..d].to_vec());
        let r = theorem1_check(&c, &p, &v).unwrap();
        prop_assert!(r.identity_rel_err() <= 1e-8 || (r.lhs.abs() < 1e-12 && r.rhs.abs() < 1e-12));
        prop_assert!(r.lhs >= -1e-12 * v.norm_sq().max(1.0));
    }

    #[test]
    fn lemma1_witness_is_exact(d in 2usize..9, extra in 1usize..8, seed in any::<u64>(), alpha in prop::collection::vec(-1.0..1.0f64, 16)) {
        let n = d + extra;
        let b = basis(d, n, seed, 0);
        let c = compose(&b, &alpha[..n]).unwrap();
        let w = lemma1_witness(&b, &c).unwrap();
        prop_assert!(null_space(&b.operator()).rank <= d);
        prop_assert!(w.kernel_dim >= n - d);
        prop_assert!(w.delta_v_d <= 1e-9 * c.v_d.norm().max(1.0));
    }

    #[test]
    fn sector_label_is_scale_invariant((d, n, seed, t, alpha) in config_case(), xy in (-3.0..3.0f64, -3.0..3.0f64), s in 1e-3..1e3f64) {
        let b = basis(d, n, seed, t);
        let c = compose(&b, &alpha).unwrap();
        prop_assume!(!c.is_degenerate());
        let Ok(p) = normal_plane(&c, &b) else { return Ok(()) };
        for rule in [SectorRule::Signed, SectorRule::Absolute] {
            let (Ok(a), Ok(z)) = (sector(&p, [xy.0, xy.1], rule), sector(&p, [s * xy.0, s * xy.1], rule)) else {
                continue;
            };
            let margin = (a.beta_c - a.beta_others_sum).abs();
            if margin > 1e-9 * (a.beta_c.abs() + a.beta_others_sum.abs()).max(1e-300) {
                prop_assert_eq!(a.label, z.label);
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn theorem2_postcondition(d in 3usize..10, extra in 1usize..4, seed in any::<u64>()) {
        let w = theorem2_counterexample(d, d + extra, seed).unwrap();
        prop_assert!(w.delta_v_d <= 1e-9);
        prop_assert!(w.f_a > 0.0 && w.f_b < 0.0);
        prop_assert!(w.plane_a.e1.dot(&w.plane_b.e1) > 1.0 - 1e-9);
    }
}

// ----------------------------------------------------------------- steering

fn activation_set(pos: Vec<Vec<f64>>, neg: Vec<Vec<f64>>) -> ActivationSet<f64> {
    let p: Vec<Vec64> = pos.into_iter().map(Vec64::from).collect();
    let n: Vec<Vec64> = neg.into_iter().map(Vec64::from).collect();
    ActivationSet::new(Matrix::from_rows(&p).unwrap(), Matrix::from_rows(&n).unwrap(), 0, "c").unwrap()
}

proptest! {
    #[test]
    fn diffmean_matches_mean_centering_on_pairs(rows in prop::collection::vec((vec_of(4), vec_of(4)), 1..12)) {
        let (pos, neg): (Vec<_>, Vec<_>) = rows.into_iter().unzip();
        let set = activation_set(pos, neg);
        let opts = BuildOptions::default();
        let (Ok(a), Ok(b)) = (build(&set, Method::Diffmean, &opts), build(&set, Method::MeanCentering, &opts)) else {
            return Ok(());
        };
        prop_assert!((&a.v - &b.v).max_abs() <= 1e-12 * a.norm.max(1.0));
    }

    #[test]
    fn penalty_keeps_axial_and_shrinks(v in nonzero(6), vd in nonzero(6), r1 in 0.0..1.0f64, r2 in 0.0..1.0f64) {
        let sv = SteeringVector::new(v, Method::Diffmean, 0, "c").unwrap();
        let u = vd.normalized().unwrap();
        let (lo, hi) = if r1 <= r2 { (r1, r2) } else { (r2, r1) };
        let a = apply_penalty(&sv, &vd, lo).unwrap();
        let b = apply_penalty(&sv, &vd, hi).unwrap();
        prop_assert!((a.v.dot(&u) - sv.v.dot(&u)).abs() <= 1e-10 * sv.norm.max(1.0));
        prop_assert!((b.v.dot(&u) - sv.v.dot(&u)).abs() <= 1e-10 * sv.norm.max(1.0));
        prop_assert!(b.norm <= a.norm + 1e-12);
    }

    #[test]
    fn probe_direction_ignores_common_translation(shift in vec_of(3), seed in 0u64..1000) {
        let jitter = |i: usize, k: usize| (((seed as usize + 7 * i + 3 * k) % 11) as f64 - 5.0) * 0.05;
        let pos: Vec<Vec<f64>> = (0..6).map(|i| vec![1.5 + jitter(i, 0), jitter(i, 1), jitter(i, 2)]).collect();
        let neg: Vec<Vec<f64>> = (0..6).map(|i| vec![-1.5 + jitter(i, 3), jitter(i, 4), jitter(i, 5)]).collect();
        let moved = |rows: &[Vec<f64>]| -> Vec<Vec<f64>> {
            rows.iter().map(|r| r.iter().zip(&shift).map(|(a, b)| a + b).collect()).collect()
        };
        let opts = BuildOptions::default();
        let a = build(&activation_set(pos.clone(), neg.clone()), Method::Probe, &opts).unwrap();
        let b = build(&activation_set(moved(&pos), moved(&neg)), Method::Probe, &opts).unwrap();
        prop_assert!(a.v.cosine(&b.v).unwrap() >= 1.0 - 1e-6);
    }
}

// ------------------------------------------------------------------ probing

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn optimizer_is_feasible_and_descends(seed in 0u64..10_000, d in 4usize..12) {
        let sc = ScenarioConfig { d, n: d / 2 + 1, seed, ..ScenarioConfig::default() };
        let Ok(sc) = sc.build() else { return Ok(()) };
        let vd = sc.model.v_d();
        let o = optimize_budgeted(&sc.model, vd, &BudgetSchedule::default()).unwrap();
        for i in 0..o.len() {
            prop_assert!(o.vectors.row_vector(i).norm() <= o.weights[i] * vd.norm() + 1e-8);
            prop_assert!(o.losses[i] <= o.initial_losses[i]);
        }
    }

    #[test]
    fn random_frames_are_orthonormal_and_zero_radius_is_flat(seed in any::<u64>(), origin in nonzero(6)) {
        let frame = CylinderFrame::random(origin, seed).unwrap();
        prop_assert!(frame.orthonormality_error() <= 1e-8);
        let sc = ScenarioConfig { d: 6, n: 4, seed, ..ScenarioConfig::default() };
        let Ok(sc) = sc.build() else { return Ok(()) };
        let spec = SweepSpec {
            axial_positions: vec![-0.5, 0.0, 1.0],
            phases: phase_grid(12),
            radii: radius_grid(3, 1.0),
            with_origin: true,
        };
        let g = sweep(&sc.model, &frame, &spec).unwrap();
        for a in 0..3 {
            let vals: Vec<f64> = (0..12).map(|p| g.get(a, p, 0)).collect();
            let spread = vals.iter().cloned().fold(f64::MIN, f64::max) - vals.iter().cloned().fold(f64::MAX, f64::min);
            prop_assert!(spread <= 1e-10);
        }
    }
}

proptest! {
    #[test]
    fn normalized_maps_ignore_affine_loss_changes(loss in prop::collection::vec(-10.0..10.0f64, 24), a in 0.01..100.0f64, b in -50.0..50.0f64) {
        let grid = |l: Vec<f64>| ProbeGrid {
            axial_positions: vec![0.0, 1.0],
            phases: phase_grid(4),
            radii: radius_grid(3, 1.0),
            loss: l,
            failed: 0,
        };
        let base = grid(loss.clone()).normalized_maps();
        let moved = grid(loss.iter().map(|x| a * x + b).collect()).normalized_maps();
        for (s, t) in base.iter().flatten().flatten().zip(moved.iter().flatten().flatten()) {
            prop_assert!((s - t).abs() <= 1e-9);
        }
    }
}

// ------------------------------------------------------------- implications

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn judge_never_falls_back_from_target(seed in 0u64..10_000) {
        let sc = ScenarioConfig { d: 8, n: 4, seed, ..ScenarioConfig::default() }.build().unwrap();
        let m = &sc.model;
        let dir = m.basis.target_direction();
        let mut seen_target = false;
        for k in 0..200 {
            let mut state = m.origin.clone();
            state.axpy(k as f64 * 0.02, dir);
            match judge(m, &state) {
                OutcomeLabel::Target => seen_target = true,
                OutcomeLabel::Normal => prop_assert!(!seen_target),
                OutcomeLabel::Corrupted => break,
            }
        }
    }

    #[test]
    fn penalty_grid_fractions_are_bounded_and_corruption_grows(seed in 0u64..10_000) {
        let cfg = ScenarioConfig { d: 16, n: 6, seed, ..ScenarioConfig::default() };
        let setup = SteeringSetup { samples: 8, ..SteeringSetup::default() };
        let Ok(s) = steering_scenario(&cfg, &setup) else { return Ok(()) };
        let spec = GridSpec { rho_steps: 6, lambda_steps: 8, lambda_max: 1.5 * s.full_penalty_reach };
        let g = penalty_grid(&s.samples, &s.v, &s.v_d, &spec).unwrap();
        for i in 0..6 {
            for j in 0..8 {
                let (act, cor) = (g.activation.get(i, j), g.corruption.get(i, j));
                prop_assert!((0.0..=1.0).contains(&act) && (0.0..=1.0).contains(&cor));
                if j > 0 {
                    prop_assert!(cor >= g.corruption.get(i, j - 1));
                }
            }
        }
    }

    #[test]
    fn scan_ignores_positive_rescaling(seed in 0u64..10_000, scale in 1e-3..1e3f64) {
        let spec = PowerLawSpec { samples: 40, noise: 0.05, ..PowerLawSpec::default() };
        let cfg = ScanConfig { m_resolution: 16, ..ScanConfig::default() };
        let base = power_law_samples(&spec, seed);
        let scaled: Vec<ScanSample> = base.iter().map(|s| ScanSample { steerability: s.steerability * scale, ..s.clone() }).collect();
        let a = correlation_scan(&base, &cfg).unwrap();
        let b = correlation_scan(&scaled, &cfg).unwrap();
        for (x, y) in a.rho_k.iter().zip(&b.rho_k) {
            prop_assert!((x - y).abs() <= 1e-10);
        }
    }

    #[test]
    fn transfer_ignores_order_and_labels(vs in prop::collection::vec((nonzero(4), 0.1..5.0f64, 0usize..3), 4..20), rot in 0usize..20) {
        let samples: Vec<TransferSample> = vs
            .iter()
            .map(|(v, l, c)| TransferSample { concept: format!("c{c}"), v_d: v.clone(), lambda_star: Some(*l) })
            .collect();
        let mut shuffled = samples.clone();
        shuffled.rotate_left(rot % samples.len());
        shuffled.reverse();
        for s in &mut shuffled {
            s.concept = format!("renamed-{}", 9 - s.concept[1..].parse::<usize>().unwrap());
        }
        let a = similarity_transfer(&samples).unwrap();
        let b = similarity_transfer(&shuffled).unwrap();
        let mut pa: Vec<(f64, f64)> = a.sims.iter().copied().zip(a.deltas.iter().copied()).collect();
        let mut pb: Vec<(f64, f64)> = b.sims.iter().copied().zip(b.deltas.iter().copied()).collect();
        prop_assert_eq!(pa.len(), pb.len());
        pa.sort_by(|x, y| x.partial_cmp(y).unwrap());
        pb.sort_by(|x, y| x.partial_cmp(y).unwrap());
        for (x, y) in pa.iter().zip(&pb) {
            prop_assert!((x.0 - y.0).abs() <= 1e-12 && (x.1 - y.1).abs() <= 1e-12);
        }
        match (a.stat, b.stat) {
            (Some(x), Some(y)) => prop_assert!((x.r - y.r).abs() <= 1e-9),
            (None, None) => {}
            _ => prop_assert!(false, "correlation defined in only one ordering"),
        }
    }
}

// ----------------------------------------------------------------------- io

proptest! {
    #[test]
    fn actv_round_trip(rows in 0usize..6, d in 2usize..7, seed in any::<u64>()) {
        let data: Vec<f64> = (0..rows * d).map(|i| ((seed.wrapping_add(i as u64) % 1000) as f64 - 500.0) / 7.0).collect();
        let m = Matrix::new(rows, d, data.clone()).unwrap();
        let h = ActvHeader::new(d, rows, -3, "concept", Role::Neg, "tag");
        let bytes = encode_actv(&h, &m).unwrap();
        prop_assert_eq!(bytes.len() - bytes.iter().position(|b| *b == b'\n').unwrap() - 1
            - bytes[6..].iter().position(|b| *b == b'\n').unwrap() - 1, rows * d * 4);
        let back = decode_actv(&bytes).unwrap();
        prop_assert_eq!(&back.header, &h);
        for (x, y) in data.iter().zip(back.matrix.data()) {
            prop_assert_eq!((*x as f32) as f64, *y);
        }
    }

    #[test]
    fn csv_floats_reparse_exactly(x in any::<f64>()) {
        let back: f64 = fmt_f64(x).parse().unwrap();
        prop_assert!(back == x || (x.is_nan() && back.is_nan()));
    }
}
