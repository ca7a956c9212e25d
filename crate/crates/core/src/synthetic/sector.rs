// SPDX-License-Identifier: MIT OR Apache-2.0

//! Phase sectors of the normal plane and the net target effect of an
//! in-plane steering direction.

use serde::{Deserialize, Serialize};

use super::plane::{wrap_phase, NormalPlane};
use crate::error::{CrhError, Result};
use crate::linalg::{symmetric_eigen, Matrix};

/// How the non-target coefficients are aggregated before comparison.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SectorRule {
    /// `β_c > Σ_{i≠c} βᵢ` with signed coefficients.
    #[default]
    Signed,
    /// `β_c > Σ_{i≠c} |βᵢ|`.
    Absolute,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SectorLabel {
    HighSensitivity,
    LowSensitivity,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SectorReport {
    pub beta_c: f64,
    pub beta_others_sum: f64,
    pub betas: Vec<f64>,
    pub phase: f64,
    pub label: SectorLabel,
    pub rule: SectorRule,
}

/// Minimum-norm coefficients `β` with `Σ βᵢ partsᵢ = v` (least squares when
/// `v` is outside the span of the parts).
pub fn min_norm_coefficients(parts: &[[f64; 2]], v: [f64; 2]) -> Result<Vec<f64>> {
    let scale = parts.iter().map(|p| p[0].abs().max(p[1].abs())).fold(0.0, f64::max);
    if !(scale > 0.0) {
        return Err(CrhError::SectorUndefined("all projected concept parts vanish".into()));
    }
    let (mut s00, mut s01, mut s11) = (0.0, 0.0, 0.0);
    for p in parts {
        s00 += p[0] * p[0];
        s01 += p[0] * p[1];
        s11 += p[1] * p[1];
    }
    let gram = Matrix::new(2, 2, vec![s00, s01, s01, s11])?;
    let eig = symmetric_eigen(&gram)?;
    let lead = eig.values[0];
    // y = (M Mᵀ)⁺ v
    let mut y = [0.0; 2];
    for (lam, u) in eig.values.iter().zip(&eig.vectors) {
        if *lam > 1e-12 * lead {
            let c = (u[0] * v[0] + u[1] * v[1]) / lam;
            y[0] += c * u[0];
            y[1] += c * u[1];
        }
    }
    Ok(parts.iter().map(|p| p[0] * y[0] + p[1] * y[1]).collect())
}

/// Sector of an in-plane direction given the projected concept parts.
pub fn sector_from_parts(
    parts: &[[f64; 2]],
    target: usize,
    v_plane: [f64; 2],
    rule: SectorRule,
) -> Result<SectorReport> {
    if target >= parts.len() {
        return Err(CrhError::InvalidArgument(format!(
            "target {target} out of range for {} concepts",
            parts.len()
        )));
    }
    if !(v_plane[0].hypot(v_plane[1]) > 0.0) {
        return Err(CrhError::SectorUndefined("in-plane vector is zero".into()));
    }
    let betas = min_norm_coefficients(parts, v_plane)?;
    let beta_c = betas[target];
    let beta_others_sum = betas
        .iter()
        .enumerate()
        .filter(|&(i, _)| i != target)
        .map(|(_, b)| match rule {
            SectorRule::Signed => *b,
            SectorRule::Absolute => b.abs(),
        })
        .sum::<f64>();
    let label = if beta_c > beta_others_sum {
        SectorLabel::HighSensitivity
    } else {
        SectorLabel::LowSensitivity
    };
    Ok(SectorReport {
        beta_c,
        beta_others_sum,
        betas,
        phase: wrap_phase(v_plane[1].atan2(v_plane[0])),
        label,
        rule,
    })
}

pub fn sector(plane: &NormalPlane, v_plane: [f64; 2], rule: SectorRule) -> Result<SectorReport> {
    sector_from_parts(&plane.parts, plane.target, v_plane, rule)
}

/// Resultant `(B, δ)` of the sinusoids `Σ aᵢ cos(φ − δᵢ) = B cos(φ − δ)`.
pub fn interference_phasor(amps: &[f64], deltas: &[f64]) -> Result<(f64, f64)> {
    if amps.len() != deltas.len() {
        return Err(CrhError::DimensionMismatch {
            expected: amps.len(),
            actual: deltas.len(),
        });
    }
    let (mut x, mut y) = (0.0, 0.0);
    for (a, d) in amps.iter().zip(deltas) {
        if !(*a >= 0.0) {
            return Err(CrhError::InvalidArgument(format!("negative amplitude {a}")));
        }
        x += a * d.cos();
        y += a * d.sin();
    }
    Ok((x.hypot(y), wrap_phase(y.atan2(x))))
}

/// `‖v⟂‖ (amp_c cos(φ − δ_c) − B cos(φ − δ))`: the target response of a unit
/// in-plane direction at phase `φ` net of the non-target resultant.
pub fn net_effect(phi: f64, amp_c: f64, delta_c: f64, amps: &[f64], deltas: &[f64], v_perp_norm: f64) -> Result<f64> {
    if !(amp_c >= 0.0) || !(v_perp_norm >= 0.0) {
        return Err(CrhError::InvalidArgument(
            "amplitudes and norms must be non-negative".into(),
        ));
    }
    let (b, delta) = interference_phasor(amps, deltas)?;
    Ok(v_perp_norm * (amp_c * (phi - delta_c).cos() - b * (phi - delta).cos()))
}

/// [`net_effect`] with amplitudes and phases read from the plane's parts.
pub fn plane_net_effect(plane: &NormalPlane, phi: f64, v_perp_norm: f64) -> Result<f64> {
    let phasors = plane.phasors();
    let (amp_c, delta_c) = phasors[plane.target];
    let (amps, deltas): (Vec<f64>, Vec<f64>) = phasors
        .iter()
        .enumerate()
        .filter(|&(i, _)| i != plane.target)
        .map(|(_, p)| *p)
        .unzip();
    net_effect(phi, amp_c, delta_c, &amps, &deltas, v_perp_norm)
}
