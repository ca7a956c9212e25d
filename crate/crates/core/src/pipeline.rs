// SPDX-License-Identifier: MIT OR Apache-2.0

//! Subcommand bodies: each turns a [`RunConfig`] into a result bundle.

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::Serialize;

use crate::error::{CrhError, Result};
use crate::implications::{
    correlation_scan, null_transfer_samples, penalty_grid, power_law_samples, similarity_transfer, steering_scenario,
    PenaltyGrid, ScanResult, TransferPairs,
};
use crate::io::{fmt_f64, read_actv, write_actv, ActvFile, ActvHeader, Bundle, CsvTable, Manifest, Role, RunConfig};
use crate::linalg::{split_on_unit, uncentered_directions};
use crate::probing::{null_control, probe, CylinderFrame, ProbeGrid, ProbeSummary};
use crate::stats::{spearman, CorrStat};
use crate::steering::{build, ActivationSet, Method, SteeringRecord, SteeringVector};
use crate::synthetic::{plane_net_effect, sector, wrap_phase, NormalPlane, Scenario, SectorReport, SectorRule};
use crate::verify::{verify_theory, TheoryReport};
use crate::Vec64;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    GenScenario,
    BuildVectors,
    Decompose,
    Probe,
    NullControl,
    Implication1,
    Implication2,
    Implication3,
    VerifyTheory,
    Report,
}

impl Command {
    pub const ALL: [Command; 10] = [
        Command::GenScenario,
        Command::BuildVectors,
        Command::Decompose,
        Command::Probe,
        Command::NullControl,
        Command::Implication1,
        Command::Implication2,
        Command::Implication3,
        Command::VerifyTheory,
        Command::Report,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Command::GenScenario => "gen-scenario",
            Command::BuildVectors => "build-vectors",
            Command::Decompose => "decompose",
            Command::Probe => "probe",
            Command::NullControl => "null-control",
            Command::Implication1 => "implication1",
            Command::Implication2 => "implication2",
            Command::Implication3 => "implication3",
            Command::VerifyTheory => "verify-theory",
            Command::Report => "report",
        }
    }
}

impl fmt::Display for Command {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Command {
    type Err = CrhError;
    fn from_str(s: &str) -> Result<Self> {
        Command::ALL
            .into_iter()
            .find(|c| c.name() == s)
            .ok_or_else(|| CrhError::InvalidArgument(format!("unknown command {s:?}")))
    }
}

/// Runs `command` and writes its bundle. Failed verification still writes
/// the report before returning [`CrhError::CheckFailed`].
pub fn run_pipeline(config: &RunConfig, command: Command, bundle: &Bundle) -> Result<Manifest> {
    config.validate()?;
    log::info!("{command}: seed {} config {}", config.seed(), &config.hash()[..12]);
    match command {
        Command::GenScenario => gen_scenario(config, bundle),
        Command::BuildVectors => build_vectors(config, bundle),
        Command::Decompose => decompose(config, bundle),
        Command::Probe => run_probe(config, bundle),
        Command::NullControl => run_null_control(config, bundle),
        Command::Implication1 => implication1(config, bundle),
        Command::Implication2 => implication2(config, bundle),
        Command::Implication3 => implication3(config, bundle),
        Command::VerifyTheory => run_verify(config, bundle),
        Command::Report => report(config, bundle),
    }
}

fn f64_row(xs: &[f64]) -> Vec<String> {
    xs.iter().map(|x| fmt_f64(*x)).collect()
}

fn opt_cell(x: Option<f64>) -> String {
    x.map(fmt_f64).unwrap_or_default()
}

// ---------------------------------------------------------------- scenario

#[derive(Serialize)]
struct PlaneReport {
    axis: Vec64,
    e1: Vec64,
    e2: Vec64,
    e2_completed: bool,
    /// `(x, y)` per concept.
    parts: Vec<[f64; 2]>,
    parts_sum: [f64; 2],
}

impl From<&NormalPlane> for PlaneReport {
    fn from(p: &NormalPlane) -> Self {
        Self {
            axis: p.axis.clone(),
            e1: p.e1.clone(),
            e2: p.e2.clone(),
            e2_completed: p.e2_completed,
            parts: p.parts.clone(),
            parts_sum: p.parts_sum(),
        }
    }
}

#[derive(Serialize)]
struct ScenarioReport<'a> {
    scenario: &'a Scenario,
    v_d_norm: f64,
    plane: PlaneReport,
    pairs: usize,
}

fn scenario_plane(sc: &Scenario) -> Result<NormalPlane> {
    crate::synthetic::normal_plane(&sc.config, &sc.basis)
}

fn concept_table(sc: &Scenario, plane: &NormalPlane) -> CsvTable {
    let mut t = CsvTable::new("concepts", &["index", "alpha", "axial", "x", "y", "amplitude", "phase"]);
    let axis = &plane.axis;
    for (i, ((a, dir), (amp, phase))) in sc
        .config
        .alpha
        .iter()
        .zip(sc.basis.directions())
        .zip(plane.phasors())
        .enumerate()
    {
        let axial = a * dir.dot(axis);
        let mut row = vec![i.to_string()];
        row.extend(f64_row(&[*a, axial, plane.parts[i][0], plane.parts[i][1], amp, phase]));
        t.push(row);
    }
    t
}

fn gen_scenario(config: &RunConfig, bundle: &Bundle) -> Result<Manifest> {
    let sc = config.scenario.build()?;
    let plane = scenario_plane(&sc)?;
    let set = sc.contrastive_pairs(config.steering.pairs, config.steering.noise)?;
    let tag = &config.io.model_tag;
    let mut extra = Vec::new();
    for (role, m, suffix) in [(Role::Pos, &set.positives, "pos"), (Role::Neg, &set.negatives, "neg")] {
        let name = format!("gen-scenario.{suffix}.actv1");
        let header = ActvHeader::new(m.cols(), m.rows(), set.layer_id, &set.concept_id, role, tag);
        write_actv(&bundle.dir().join(&name), &header, m)?;
        extra.push(name);
    }
    let report = ScenarioReport {
        scenario: &sc,
        v_d_norm: sc.config.v_d.norm(),
        plane: PlaneReport::from(&plane),
        pairs: set.positives.rows(),
    };
    bundle.write(
        "gen-scenario",
        config,
        &report,
        &[concept_table(&sc, &plane)],
        &extra,
        None,
    )
}

// ---------------------------------------------------------------- vectors

/// Activations from ACTV1 inputs when configured, synthetic pairs otherwise.
struct Activations {
    set: ActivationSet<f64>,
    scenario: Option<Scenario>,
    provenance: Option<serde_json::Value>,
}

fn read_side(path: &str, expect: Role) -> Result<ActvFile> {
    let file = read_actv(Path::new(path))?;
    if file.header.role != expect {
        log::warn!("{path}: role {:?}, expected {:?}", file.header.role, expect);
    }
    Ok(file)
}

fn load_activations(config: &RunConfig) -> Result<Activations> {
    match (&config.io.positives, &config.io.negatives) {
        (Some(p), Some(n)) => {
            let pos = read_side(p, Role::Pos)?;
            let neg = read_side(n, Role::Neg)?;
            if pos.header.layer_id != neg.header.layer_id || pos.header.model_tag != neg.header.model_tag {
                log::warn!("positive and negative files disagree on layer or model tag");
            }
            let provenance = serde_json::json!({
                "model_tag": pos.header.model_tag,
                "layer_id": pos.header.layer_id,
                "concept_id": pos.header.concept_id,
                "d": pos.header.d,
                "positives": pos.header.rows,
                "negatives": neg.header.rows,
            });
            let set = ActivationSet::new(pos.matrix, neg.matrix, pos.header.layer_id, pos.header.concept_id)?;
            Ok(Activations {
                set,
                scenario: None,
                provenance: Some(provenance),
            })
        }
        (None, None) => {
            let sc = config.scenario.build()?;
            let set = sc.contrastive_pairs(config.steering.pairs, config.steering.noise)?;
            Ok(Activations {
                set,
                scenario: Some(sc),
                provenance: None,
            })
        }
        _ => Err(CrhError::InvalidArgument(
            "io.positives and io.negatives must be given together".into(),
        )),
    }
}

#[derive(Serialize)]
struct VectorSummary {
    method: Method,
    norm: f64,
    /// Cosine with the mean paired difference.
    cosine_to_mean_difference: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    cosine_to_true_difference: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    probe: Option<crate::steering::ProbeReport>,
    file: String,
}

fn mean_difference(set: &ActivationSet<f64>) -> Vec64 {
    let mut mean = set.positives.column_means();
    mean.axpy(-1.0, &set.negatives.column_means());
    mean
}

fn build_vectors(config: &RunConfig, bundle: &Bundle) -> Result<Manifest> {
    let acts = load_activations(config)?;
    let mean = mean_difference(&acts.set);
    let truth = acts.scenario.as_ref().map(|s| &s.config.v_d);
    let mut summaries = Vec::new();
    let mut extra = Vec::new();
    let mut table = CsvTable::new("methods", &["method", "norm", "cosine_to_mean_difference"]);
    for &method in &config.steering.methods {
        let v = build(&acts.set, method, &config.steering.build)?;
        let file = format!("build-vectors.{}.vector.json", method.name());
        let mut bytes = serde_json::to_vec_pretty(&v.to_record())?;
        bytes.push(b'\n');
        bundle.write_file(&file, &bytes)?;
        extra.push(file.clone());
        let cos = v.v.cosine(&mean);
        table.push(vec![method.name().into(), fmt_f64(v.norm), opt_cell(cos)]);
        summaries.push(VectorSummary {
            method,
            norm: v.norm,
            cosine_to_mean_difference: cos,
            cosine_to_true_difference: truth.and_then(|t| v.v.cosine(t)),
            probe: v.probe,
            file,
        });
    }
    bundle.write("build-vectors", config, &summaries, &[table], &extra, acts.provenance)
}

// ---------------------------------------------------------------- decompose

#[derive(Serialize)]
struct VectorDecomposition {
    label: String,
    norm: f64,
    axial: f64,
    plane: [f64; 2],
    plane_norm: f64,
    phase: f64,
    residual_norm: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    sector: Option<SectorReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    net_effect: Option<f64>,
}

#[derive(Serialize)]
struct DecomposeReport {
    source: &'static str,
    v_d_norm: f64,
    plane: PlaneFrame,
    vectors: Vec<VectorDecomposition>,
}

#[derive(Serialize)]
struct PlaneFrame {
    axis: Vec64,
    e1: Vec64,
    e2: Vec64,
}

/// Frame for measured data: axis along the mean difference, plane spanned
/// by the two leading uncentered directions of the per-pair perpendicular
/// parts.
fn empirical_frame(set: &ActivationSet<f64>, v_d: &Vec64) -> Result<PlaneFrame> {
    let axis = v_d
        .normalized()
        .map_err(|_| CrhError::DegenerateAxis("mean difference is zero".into()))?;
    let diffs = set.differences()?;
    let perps: Vec<Vec64> = diffs
        .row_vectors()
        .iter()
        .map(|r| split_on_unit(r, &axis).perp)
        .collect();
    let (_, dirs) = uncentered_directions(&perps, 2)?;
    match <[Vec64; 2]>::try_from(dirs) {
        Ok([e1, e2]) => Ok(PlaneFrame { axis, e1, e2 }),
        Err(d) => Err(CrhError::PlaneUndefined(format!(
            "per-pair perpendicular parts span {} direction(s), need 2",
            d.len()
        ))),
    }
}

fn decompose_on(
    label: String,
    v: &Vec64,
    frame: &PlaneFrame,
    plane: Option<&NormalPlane>,
) -> Result<VectorDecomposition> {
    v.check_dim(frame.axis.dim())?;
    let s = split_on_unit(v, &frame.axis);
    let xy = [s.perp.dot(&frame.e1), s.perp.dot(&frame.e2)];
    let mut residual = s.perp.clone();
    residual.axpy(-xy[0], &frame.e1);
    residual.axpy(-xy[1], &frame.e2);
    let plane_norm = xy[0].hypot(xy[1]);
    let phase = wrap_phase(xy[1].atan2(xy[0]));
    let (sector, net) = match plane {
        Some(p) if plane_norm > 0.0 => (
            Some(sector(p, xy, SectorRule::Signed)?),
            Some(plane_net_effect(p, phase, s.perp.norm())?),
        ),
        _ => (None, None),
    };
    Ok(VectorDecomposition {
        label,
        norm: v.norm(),
        axial: s.axial,
        plane: xy,
        plane_norm,
        phase,
        residual_norm: residual.norm(),
        sector,
        net_effect: net,
    })
}

fn read_vector(path: &str) -> Result<SteeringVector<f64>> {
    let text = std::fs::read_to_string(path)?;
    let rec: SteeringRecord = serde_json::from_str(&text)?;
    SteeringVector::from_record(&rec)
}

fn decompose(config: &RunConfig, bundle: &Bundle) -> Result<Manifest> {
    let acts = load_activations(config)?;
    let mut vectors: Vec<(String, Vec64)> = Vec::new();
    if let Some(path) = &config.io.vector {
        vectors.push((path.clone(), read_vector(path)?.v));
    } else {
        for &m in &config.steering.methods {
            vectors.push((m.name().into(), build(&acts.set, m, &config.steering.build)?.v));
        }
    }
    let (source, frame, plane, v_d) = match &acts.scenario {
        Some(sc) => {
            let p = scenario_plane(sc)?;
            let frame = PlaneFrame {
                axis: p.axis.clone(),
                e1: p.e1.clone(),
                e2: p.e2.clone(),
            };
            ("synthetic", frame, Some(p), sc.config.v_d.clone())
        }
        None => {
            let v_d = mean_difference(&acts.set);
            ("activations", empirical_frame(&acts.set, &v_d)?, None, v_d)
        }
    };
    let decomps = vectors
        .into_iter()
        .map(|(label, v)| decompose_on(label, &v, &frame, plane.as_ref()))
        .collect::<Result<Vec<_>>>()?;
    let mut table = CsvTable::new(
        "vectors",
        &[
            "label",
            "norm",
            "axial",
            "x",
            "y",
            "plane_norm",
            "phase",
            "residual_norm",
            "sector",
            "net_effect",
        ],
    );
    for d in &decomps {
        let mut row = vec![d.label.clone()];
        row.extend(f64_row(&[
            d.norm,
            d.axial,
            d.plane[0],
            d.plane[1],
            d.plane_norm,
            d.phase,
            d.residual_norm,
        ]));
        row.push(d.sector.as_ref().map(|s| format!("{:?}", s.label)).unwrap_or_default());
        row.push(opt_cell(d.net_effect));
        table.push(row);
    }
    let report = DecomposeReport {
        source,
        v_d_norm: v_d.norm(),
        plane: frame,
        vectors: decomps,
    };
    bundle.write("decompose", config, &report, &[table], &[], acts.provenance)
}

// ---------------------------------------------------------------- probing

fn grid_table(name: &str, grid: &ProbeGrid) -> CsvTable {
    let mut t = CsvTable::new(name, &["axial", "phase", "radius", "loss"]);
    for row in grid.long_form() {
        t.push_f64(&row);
    }
    t
}

#[derive(Serialize)]
struct ProbeReport<'a> {
    run: &'a crate::probing::ProbeRun,
    top3_explained_variance: f64,
    grid_shape: [usize; 3],
}

fn run_probe(config: &RunConfig, bundle: &Bundle) -> Result<Manifest> {
    let sc = config.scenario.build()?;
    let run = probe(&sc.model, sc.model.v_d(), &config.probe)?;
    let (a, p, r) = run.grid.shape();
    let mut opt = CsvTable::new("optimized", &["weight", "norm", "loss", "initial_loss"]);
    for (i, w) in run.optimized.weights.iter().enumerate() {
        let norm = run.optimized.vectors.row_vector(i).norm();
        opt.push_f64(&[*w, norm, run.optimized.losses[i], run.optimized.initial_losses[i]]);
    }
    let report = ProbeReport {
        run: &run,
        top3_explained_variance: run.explained_variance_ratio.iter().take(3).sum(),
        grid_shape: [a, p, r],
    };
    bundle.write(
        "probe",
        config,
        &report,
        &[grid_table("grid", &run.grid), opt],
        &[],
        None,
    )
}

#[derive(Serialize)]
struct NullReport {
    optimized: ProbeSummary,
    random: ProbeSummary,
    optimized_wins: bool,
    explained_variance_ratio: Vec<f64>,
    random_frame: CylinderFrame,
    optimized_grid: ProbeGrid,
    random_grid: ProbeGrid,
}

fn run_null_control(config: &RunConfig, bundle: &Bundle) -> Result<Manifest> {
    let sc = config.scenario.build()?;
    let nc = null_control(&sc.model, sc.model.v_d(), config.seed(), &config.probe)?;
    let mut summary = CsvTable::new(
        "summary",
        &["frame", "mean_loss", "loss_std", "axis_range", "phase_range"],
    );
    for (name, s) in [("optimized", &nc.optimized), ("random", &nc.random)] {
        let mut row = vec![name.to_string()];
        row.extend(f64_row(&[s.mean_loss, s.loss_std, s.axis_range, s.phase_range]));
        summary.push(row);
    }
    let tables = [
        summary,
        grid_table("optimized_grid", &nc.optimized_grid),
        grid_table("random_grid", &nc.random_grid),
    ];
    let report = NullReport {
        optimized: nc.optimized,
        random: nc.random,
        optimized_wins: nc.optimized.phase_range > nc.random.phase_range,
        explained_variance_ratio: nc.explained_variance_ratio,
        random_frame: nc.random_frame,
        optimized_grid: nc.optimized_grid,
        random_grid: nc.random_grid,
    };
    bundle.write("null-control", config, &report, &tables, &[], None)
}

// ---------------------------------------------------------------- implications

#[derive(Serialize)]
pub struct Implication1Report {
    pub grid: PenaltyGrid,
    pub lambda_max: f64,
    pub full_penalty_reach: f64,
    pub onset_level: f64,
    /// First `λ` reaching the onset level per `ρ`; `None` if never reached.
    pub activation_onsets: Vec<Option<f64>>,
    pub corruption_onsets: Vec<Option<f64>>,
    /// Spearman correlation of activation onsets with `ρ`, never-reached
    /// onsets ranked last.
    pub activation_trend: Option<CorrStat<f64>>,
    pub corruption_non_decreasing: bool,
}

fn finite(x: f64) -> Option<f64> {
    x.is_finite().then_some(x)
}

pub fn implication1_report(config: &RunConfig) -> Result<Implication1Report> {
    let sec = &config.implication1;
    let s = steering_scenario(&config.scenario, &sec.setup)?;
    let spec = sec.grid(s.full_penalty_reach);
    let grid = penalty_grid(&s.samples, &s.v, &s.v_d, &spec)?;
    let act = grid.activation_onsets(sec.onset_level);
    let cor = grid.corruption_onsets(sec.onset_level);
    let ranked: Vec<f64> = act.iter().map(|x| x.min(f64::MAX)).collect();
    let trend = spearman(&grid.rhos, &ranked).ok();
    let corruption_non_decreasing = cor.windows(2).all(|w| w[1] >= w[0]);
    Ok(Implication1Report {
        lambda_max: spec.lambda_max,
        full_penalty_reach: s.full_penalty_reach,
        onset_level: sec.onset_level,
        activation_onsets: act.iter().copied().map(finite).collect(),
        corruption_onsets: cor.iter().copied().map(finite).collect(),
        activation_trend: trend,
        corruption_non_decreasing,
        grid,
    })
}

fn implication1(config: &RunConfig, bundle: &Bundle) -> Result<Manifest> {
    let rep = implication1_report(config)?;
    let g = &rep.grid;
    let mut grid = CsvTable::new("penalty_grid", &["rho", "lambda", "activation", "corruption"]);
    for (i, rho) in g.rhos.iter().enumerate() {
        for (j, lam) in g.lambdas.iter().enumerate() {
            grid.push_f64(&[*rho, *lam, g.activation.get(i, j), g.corruption.get(i, j)]);
        }
    }
    let mut onsets = CsvTable::new("onsets", &["rho", "activation_onset", "corruption_onset"]);
    for (i, rho) in g.rhos.iter().enumerate() {
        onsets.push(vec![
            fmt_f64(*rho),
            opt_cell(rep.activation_onsets[i]),
            opt_cell(rep.corruption_onsets[i]),
        ]);
    }
    bundle.write("implication1", config, &rep, &[grid, onsets], &[], None)
}

#[derive(Serialize)]
pub struct Implication2Report {
    pub scan: ScanResult,
    pub peak_k: Option<f64>,
    pub peak_rho: Option<f64>,
    pub peak_p_value: Option<f64>,
    pub peak_best_m: Option<f64>,
    pub unimodal: bool,
}

pub fn implication2_report(config: &RunConfig) -> Result<Implication2Report> {
    let sec = &config.implication2;
    let samples = power_law_samples(&sec.generator, config.seed());
    let scan = correlation_scan(&samples, &sec.scan)?;
    let peak = scan.peak();
    Ok(Implication2Report {
        peak_k: peak.map(|i| scan.k_grid[i]),
        peak_rho: peak.map(|i| scan.rho_k[i]),
        peak_p_value: peak.map(|i| scan.p_values[i]),
        peak_best_m: peak.map(|i| scan.best_m_per_k[i]),
        unimodal: scan.is_unimodal(),
        scan,
    })
}

fn implication2(config: &RunConfig, bundle: &Bundle) -> Result<Manifest> {
    let rep = implication2_report(config)?;
    let s = &rep.scan;
    let mut t = CsvTable::new("scan", &["k", "r", "p", "best_m"]);
    for i in 0..s.k_grid.len() {
        t.push_f64(&[s.k_grid[i], s.rho_k[i], s.p_values[i], s.best_m_per_k[i]]);
    }
    bundle.write("implication2", config, &rep, &[t], &[], None)
}

pub fn implication3_report(config: &RunConfig) -> Result<TransferPairs> {
    let samples = null_transfer_samples(&config.implication3.null, config.seed());
    similarity_transfer(&samples)
}

fn implication3(config: &RunConfig, bundle: &Bundle) -> Result<Manifest> {
    let rep = implication3_report(config)?;
    let mut t = CsvTable::new("pairs", &["sim", "delta"]);
    for (s, d) in rep.sims.iter().zip(&rep.deltas) {
        t.push_f64(&[*s, *d]);
    }
    bundle.write("implication3", config, &rep, &[t], &[], None)
}

// ---------------------------------------------------------------- theory

pub fn theory_report(config: &RunConfig) -> TheoryReport {
    let t = &config.theory;
    verify_theory(
        &t.dims,
        t.theorem1_instances,
        t.lemma1_instances,
        t.theorem2_seeds,
        t.balance_instances,
        config.seed(),
    )
}

fn run_verify(config: &RunConfig, bundle: &Bundle) -> Result<Manifest> {
    let rep = theory_report(config);
    let mut t = CsvTable::new("checks", &["check", "instances", "failures", "status"]);
    for c in &rep.checks {
        let status = if c.passed { "pass" } else { "fail" };
        t.push(vec![
            c.name.clone(),
            c.instances.to_string(),
            c.failures.to_string(),
            status.into(),
        ]);
    }
    let manifest = bundle.write("verify-theory", config, &rep, &[t], &[], None)?;
    if rep.all_passed {
        Ok(manifest)
    } else {
        let failed: Vec<&str> = rep
            .checks
            .iter()
            .filter(|c| !c.passed)
            .map(|c| c.name.as_str())
            .collect();
        Err(CrhError::CheckFailed(failed.join(", ")))
    }
}

// ---------------------------------------------------------------- report

#[derive(Serialize)]
struct IndexEntry {
    command: String,
    config_hash: String,
    hash_matches: bool,
    seed: u64,
    outputs: Vec<String>,
    missing: Vec<String>,
}

fn report(config: &RunConfig, bundle: &Bundle) -> Result<Manifest> {
    let mut names: Vec<String> = std::fs::read_dir(bundle.dir())?
        .filter_map(|e| e.ok())
        .map(|e| e.file_name().to_string_lossy().into_owned())
        .filter(|n| n.ends_with(".manifest.json") && n != "report.manifest.json")
        .collect();
    names.sort();
    let mut entries = Vec::new();
    let mut t = CsvTable::new(
        "manifests",
        &["command", "config_hash", "hash_matches", "seed", "outputs", "missing"],
    );
    for name in names {
        let m = Manifest::read(&bundle.dir().join(&name))?;
        let missing: Vec<String> = m
            .outputs
            .iter()
            .filter(|o| !bundle.dir().join(o).exists())
            .cloned()
            .collect();
        t.push(vec![
            m.command.clone(),
            m.config_hash.clone(),
            m.hash_matches().to_string(),
            m.seed.to_string(),
            m.outputs.len().to_string(),
            missing.len().to_string(),
        ]);
        entries.push(IndexEntry {
            command: m.command.clone(),
            config_hash: m.config_hash.clone(),
            hash_matches: m.hash_matches(),
            seed: m.seed,
            outputs: m.outputs,
            missing,
        });
    }
    bundle.write("report", config, &entries, &[t], &[], None)
}
