// SPDX-License-Identifier: MIT OR Apache-2.0

//! Steering vectors from contrastive activation sets, the orthogonal
//! penalty, and additive steering.

use serde::{Deserialize, Serialize};

use crate::error::{CrhError, Result};
use crate::linalg::{split_on_unit, uncentered_directions, Matrix, Vector};
use crate::scalar::Scalar;

/// Positive and negative representations for one concept at one layer.
#[derive(Debug, Clone, PartialEq)]
pub struct ActivationSet<T> {
    pub positives: Matrix<T>,
    pub negatives: Matrix<T>,
    pub layer_id: i64,
    pub concept_id: String,
}

impl<T: Scalar> ActivationSet<T> {
    pub fn new(
        positives: Matrix<T>,
        negatives: Matrix<T>,
        layer_id: i64,
        concept_id: impl Into<String>,
    ) -> Result<Self> {
        if positives.cols() != negatives.cols() {
            return Err(CrhError::DimensionMismatch {
                expected: positives.cols(),
                actual: negatives.cols(),
            });
        }
        if positives.cols() < 2 {
            return Err(CrhError::InvalidArgument("activation dimension below 2".into()));
        }
        if positives.rows() == 0 || negatives.rows() == 0 {
            return Err(CrhError::InvalidArgument(
                "activation sets need at least one row per side".into(),
            ));
        }
        Ok(Self {
            positives,
            negatives,
            layer_id,
            concept_id: concept_id.into(),
        })
    }

    pub fn dim(&self) -> usize {
        self.positives.cols()
    }

    pub fn is_paired(&self) -> bool {
        self.positives.rows() == self.negatives.rows()
    }

    fn require_paired(&self, what: &str) -> Result<()> {
        if self.is_paired() {
            Ok(())
        } else {
            Err(CrhError::InvalidArgument(format!(
                "{what} needs paired rows, got {} positives and {} negatives",
                self.positives.rows(),
                self.negatives.rows()
            )))
        }
    }

    /// Row-wise `pos − neg`.
    pub fn differences(&self) -> Result<Matrix<T>> {
        self.require_paired("pairwise differencing")?;
        self.positives.sub(&self.negatives)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Diffmean,
    Pca,
    MeanCentering,
    Probe,
}

impl Method {
    pub const ALL: [Method; 4] = [Method::Diffmean, Method::Pca, Method::MeanCentering, Method::Probe];

    pub fn name(self) -> &'static str {
        match self {
            Method::Diffmean => "diffmean",
            Method::Pca => "pca",
            Method::MeanCentering => "mean_centering",
            Method::Probe => "probe",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ProbeConfig {
    pub epochs: usize,
    pub learning_rate: f64,
    pub l2: f64,
    /// Gradient norm above which training counts as not converged.
    pub grad_tol: f64,
}

impl Default for ProbeConfig {
    fn default() -> Self {
        Self {
            epochs: 500,
            learning_rate: 0.05,
            l2: 1e-4,
            grad_tol: 1e-3,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ProbeReport {
    pub bias: f64,
    pub final_loss: f64,
    pub grad_norm: f64,
    pub converged: bool,
}

/// Options for [`build`].
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BuildOptions {
    pub probe: ProbeConfig,
    /// Mean-centering on unpaired sets instead of requiring pairs.
    pub unpaired_mean_centering: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SteeringVector<T> {
    pub v: Vector<T>,
    pub method: Method,
    pub norm: T,
    pub layer_id: i64,
    pub concept_id: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub probe: Option<ProbeReport>,
}

/// `{method, layer_id, concept_id, d, values}` as exchanged with the
/// extractor.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SteeringRecord {
    pub method: Method,
    pub layer_id: i64,
    pub concept_id: String,
    pub d: usize,
    pub values: Vec<f64>,
}

const DEGENERATE_NORM: f64 = 1e-12;

impl<T: Scalar> SteeringVector<T> {
    pub fn new(v: Vector<T>, method: Method, layer_id: i64, concept_id: impl Into<String>) -> Result<Self> {
        if !v.is_finite() {
            return Err(CrhError::NonFinite("steering vector".into()));
        }
        let norm = v.norm();
        if norm == T::zero() {
            return Err(CrhError::DegenerateAxis("steering vector is zero".into()));
        }
        Ok(Self {
            v,
            method,
            norm,
            layer_id,
            concept_id: concept_id.into(),
            probe: None,
        })
    }

    pub fn dim(&self) -> usize {
        self.v.dim()
    }

    /// Tiny vectors steer numerically nowhere; callers may want to skip them.
    pub fn is_degenerate(&self) -> bool {
        self.norm.widen() < DEGENERATE_NORM
    }

    pub fn to_record(&self) -> SteeringRecord {
        SteeringRecord {
            method: self.method,
            layer_id: self.layer_id,
            concept_id: self.concept_id.clone(),
            d: self.dim(),
            values: self.v.iter().map(|x| x.widen()).collect(),
        }
    }

    pub fn from_record(rec: &SteeringRecord) -> Result<Self> {
        if rec.values.len() != rec.d {
            return Err(CrhError::DimensionMismatch {
                expected: rec.d,
                actual: rec.values.len(),
            });
        }
        let v = Vector::try_new(rec.values.iter().map(|&x| T::lit(x)).collect())?;
        Self::new(v, rec.method, rec.layer_id, rec.concept_id.clone())
    }
}

fn sigmoid<T: Scalar>(z: T) -> T {
    if z >= T::zero() {
        T::one() / (T::one() + (-z).exp())
    } else {
        let e = z.exp();
        e / (T::one() + e)
    }
}

/// Full-batch L2-regularized logistic regression on pooled-mean-centered
/// features. Returns the weight vector and a training report.
fn train_probe<T: Scalar>(set: &ActivationSet<T>, cfg: &ProbeConfig) -> Result<(Vector<T>, ProbeReport)> {
    if set.positives.rows() < 2 || set.negatives.rows() < 2 {
        return Err(CrhError::InvalidArgument(
            "probe training needs at least two rows per class".into(),
        ));
    }
    if cfg.epochs == 0 || !(cfg.learning_rate > 0.0) || !(cfg.l2 >= 0.0) {
        return Err(CrhError::InvalidArgument("invalid probe configuration".into()));
    }
    let d = set.dim();
    let rows: Vec<(Vector<T>, T)> = set
        .positives
        .row_vectors()
        .into_iter()
        .map(|r| (r, T::one()))
        .chain(set.negatives.row_vectors().into_iter().map(|r| (r, T::zero())))
        .collect();
    let count = T::from_count(rows.len());
    let mut mean = Vector::zeros(d);
    for (r, _) in &rows {
        mean.axpy(T::one(), r);
    }
    let mean = mean.scaled(T::one() / count);
    let xs: Vec<(Vector<T>, T)> = rows.into_iter().map(|(r, y)| (&r - &mean, y)).collect();

    let lr = T::lit(cfg.learning_rate);
    let l2 = T::lit(cfg.l2);
    let mut w = Vector::<T>::zeros(d);
    let mut b = T::zero();
    let gradient = |w: &Vector<T>, b: T| -> (Vector<T>, T, T) {
        let mut gw = Vector::zeros(d);
        let mut gb = T::zero();
        let mut loss = T::zero();
        for (x, y) in &xs {
            let z = w.dot(x) + b;
            let p = sigmoid(z);
            // log(1 + e^z) − y z, evaluated stably
            loss += z.max(T::zero()) + (-z.abs()).exp().ln_1p() - *y * z;
            gw.axpy(p - *y, x);
            gb += p - *y;
        }
        let inv = T::one() / count;
        let mut gw = gw.scaled(inv);
        gw.axpy(l2, w);
        let half = T::lit(0.5);
        (gw, gb * inv, loss * inv + half * l2 * w.norm_sq())
    };
    for _ in 0..cfg.epochs {
        let (gw, gb, _) = gradient(&w, b);
        w.axpy(-lr, &gw);
        b -= lr * gb;
    }
    let (gw, gb, loss) = gradient(&w, b);
    let grad_norm = (gw.norm_sq() + gb * gb).sqrt().widen();
    let converged = grad_norm <= cfg.grad_tol;
    if !converged {
        log::warn!("probe did not converge: gradient norm {grad_norm:.3e}");
    }
    // Undo the centring in the bias so the classifier applies to raw inputs.
    let bias = (b - w.dot(&mean)).widen();
    Ok((
        w,
        ProbeReport {
            bias,
            final_loss: loss.widen(),
            grad_norm,
            converged,
        },
    ))
}

pub fn build<T: Scalar>(set: &ActivationSet<T>, method: Method, opts: &BuildOptions) -> Result<SteeringVector<T>> {
    let mut probe = None;
    let v = match method {
        Method::Diffmean => set.differences()?.column_means(),
        Method::Pca => {
            let diffs = set.differences()?;
            let mean = diffs.column_means();
            let (_, dirs) = uncentered_directions(&diffs.row_vectors(), 1)?;
            let pc1 = dirs
                .into_iter()
                .next()
                .ok_or_else(|| CrhError::DegenerateAxis("difference rows are all zero".into()))?;
            if pc1.dot(&mean) < T::zero() {
                -&pc1
            } else {
                pc1
            }
        }
        Method::MeanCentering => {
            if !opts.unpaired_mean_centering {
                set.require_paired("paired mean-centering")?;
            }
            &set.positives.column_means() - &set.negatives.column_means()
        }
        Method::Probe => {
            let (w, report) = train_probe(set, &opts.probe)?;
            probe = Some(report);
            w
        }
    };
    let mut sv = SteeringVector::new(v, method, set.layer_id, set.concept_id.clone())?;
    sv.probe = probe;
    Ok(sv)
}

/// Keeps the axial component along `v_d` and shrinks the rest by `1 − ρ`.
pub fn apply_penalty<T: Scalar>(v: &SteeringVector<T>, v_d: &Vector<T>, rho: T) -> Result<SteeringVector<T>> {
    v_d.check_dim(v.dim())?;
    if !(rho >= T::zero() && rho <= T::one()) {
        return Err(CrhError::InvalidArgument(format!("penalty {rho} outside [0, 1]")));
    }
    let unit = v_d.normalized()?;
    let split = split_on_unit(&v.v, &unit);
    let mut out = unit.scaled(split.axial);
    out.axpy(T::one() - rho, &split.perp);
    let norm = out.norm();
    Ok(SteeringVector {
        v: out,
        method: v.method,
        norm,
        layer_id: v.layer_id,
        concept_id: v.concept_id.clone(),
        probe: v.probe,
    })
}

/// `r + λ v`.
pub fn apply<T: Scalar>(r: &Vector<T>, v: &SteeringVector<T>, lambda: T) -> Result<Vector<T>> {
    r.check_dim(v.dim())?;
    if v.is_degenerate() {
        log::debug!("applying a degenerate steering vector");
    }
    let mut out = r.clone();
    out.axpy(lambda, &v.v);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mat(rows: &[&[f64]]) -> Matrix<f64> {
        Matrix::from_rows(&rows.iter().map(|r| Vector::from(r.to_vec())).collect::<Vec<_>>()).unwrap()
    }

    #[test]
    fn single_pair_diffmean() {
        let set = ActivationSet::new(mat(&[&[3.0, 1.0]]), mat(&[&[1.0, 2.0]]), 9, "c").unwrap();
        let v = build(&set, Method::Diffmean, &BuildOptions::default()).unwrap();
        assert_eq!(v.v.as_slice(), &[2.0, -1.0]);
    }

    #[test]
    fn constant_offset_agrees_across_methods() {
        let neg = mat(&[&[0.0, 1.0, 2.0], &[1.0, -1.0, 0.5], &[2.0, 0.0, 0.0]]);
        let u = Vector::from(vec![0.5, 0.25, -1.0]);
        let pos = Matrix::from_rows(&neg.row_vectors().iter().map(|r| r + &u).collect::<Vec<_>>()).unwrap();
        let set = ActivationSet::new(pos, neg, 0, "c").unwrap();
        let o = BuildOptions::default();
        let dm = build(&set, Method::Diffmean, &o).unwrap();
        let mc = build(&set, Method::MeanCentering, &o).unwrap();
        let pc = build(&set, Method::Pca, &o).unwrap();
        assert!((&dm.v - &u).norm() < 1e-12);
        assert!((&mc.v - &u).norm() < 1e-12);
        assert!((pc.v.dot(&u.normalized().unwrap()) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn paired_methods_reject_unpaired() {
        let set = ActivationSet::new(mat(&[&[1.0, 0.0], &[2.0, 0.0]]), mat(&[&[0.0, 0.0]]), 0, "c").unwrap();
        let o = BuildOptions::default();
        assert!(build(&set, Method::Diffmean, &o).is_err());
        assert!(build(&set, Method::Pca, &o).is_err());
        assert!(build(&set, Method::MeanCentering, &o).is_err());
        let unpaired = BuildOptions {
            unpaired_mean_centering: true,
            ..o
        };
        let mc = build(&set, Method::MeanCentering, &unpaired).unwrap();
        assert_eq!(mc.v.as_slice(), &[1.5, 0.0]);
    }

    #[test]
    fn separable_probe_points_along_x() {
        let pos = mat(&[&[1.5, 0.3], &[2.0, -0.4], &[3.0, 0.1], &[1.2, -0.2]]);
        let neg = mat(&[&[-1.5, -0.3], &[-2.0, 0.4], &[-3.0, -0.1], &[-1.2, 0.2]]);
        let set = ActivationSet::new(pos, neg, 0, "c").unwrap();
        let v = build(&set, Method::Probe, &BuildOptions::default()).unwrap();
        let angle = v.v.cosine(&Vector::basis(2, 0)).unwrap().acos().to_degrees();
        assert!(angle < 5.0, "angle {angle}");
        assert!(v.probe.is_some());
    }

    #[test]
    fn probe_needs_two_rows() {
        let set = ActivationSet::new(mat(&[&[1.0, 0.0]]), mat(&[&[0.0, 1.0]]), 0, "c").unwrap();
        assert!(build(&set, Method::Probe, &BuildOptions::default()).is_err());
    }

    #[test]
    fn penalty_hand_case() {
        let v = SteeringVector::new(Vector::from(vec![1.0, 1.0]), Method::Diffmean, 0, "c").unwrap();
        let vd = Vector::from(vec![1.0, 0.0]);
        let half = apply_penalty(&v, &vd, 0.5).unwrap();
        assert_eq!(half.v.as_slice(), &[1.0, 0.5]);
        let full = apply_penalty(&v, &vd, 1.0).unwrap();
        assert_eq!(full.v.as_slice(), &[1.0, 0.0]);
        assert_eq!(apply_penalty(&v, &vd, 0.0).unwrap().v, v.v);
        assert!(apply_penalty(&v, &Vector::zeros(2), 0.5).is_err());
        assert!(apply_penalty(&v, &vd, 1.5).is_err());
    }

    #[test]
    fn apply_arithmetic() {
        let v = SteeringVector::new(Vector::from(vec![0.0, 2.0]), Method::Probe, 0, "c").unwrap();
        let r = Vector::from(vec![1.0, 0.0]);
        assert_eq!(apply(&r, &v, 1.5).unwrap().as_slice(), &[1.0, 3.0]);
        assert_eq!(apply(&r, &v, 0.0).unwrap(), r);
        assert!(apply(&Vector::zeros(3), &v, 1.0).is_err());
        let tiny = SteeringVector::new(Vector::from(vec![1e-15, 0.0]), Method::Probe, 0, "c").unwrap();
        assert!(tiny.is_degenerate());
        assert!((&apply(&r, &tiny, 1.0).unwrap() - &r).norm() < 1e-12);
    }

    #[test]
    fn record_round_trip_f32() {
        let v = SteeringVector::new(Vector::from(vec![0.25f32, -1.5, 3.0]), Method::Pca, 9, "male_female").unwrap();
        let json = serde_json::to_string(&v.to_record()).unwrap();
        let back: SteeringRecord = serde_json::from_str(&json).unwrap();
        let w = SteeringVector::<f32>::from_record(&back).unwrap();
        assert_eq!(w.v, v.v);
        assert!(json.contains("\"method\":\"pca\""));
    }
}
