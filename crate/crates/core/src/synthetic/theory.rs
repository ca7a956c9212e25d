// SPDX-License-Identifier: MIT OR Apache-2.0

//! Executable forms of the non-identifiability lemma and the two
//! predictability results: witnesses are constructed and then checked by
//! direct evaluation.

use rand::Rng;
use serde::Serialize;

use super::basis::{gen_basis, BasisSpec, ConceptBasis};
use super::latent::{compose, LatentConfig};
use super::plane::{normal_plane, NormalPlane};
use super::sector::plane_net_effect;
use crate::error::{CrhError, Result};
use crate::linalg::{axis_complement_projector, gram_schmidt, null_space, projector, split_on_unit};
use crate::numdiff::finite_diff_grad;
use crate::rng::{seeded, Stream};
use crate::{Mat64, Vec64};

const KERNEL_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Serialize)]
pub struct Lemma1Witness {
    /// Unit kernel element of the concept operator.
    pub gamma: Vec<f64>,
    pub alpha2: Vec<f64>,
    pub rank: usize,
    pub kernel_dim: usize,
    /// `‖A γ‖`.
    pub kernel_residual: f64,
    /// `‖v_d(α) − v_d(α + γ)‖`.
    pub delta_v_d: f64,
}

fn kernel_residual(a: &Mat64, gamma: &Vec64) -> Result<f64> {
    Ok(a.matvec(gamma)?.norm())
}

/// Two strength vectors with the same difference vector. Requires more
/// concepts than dimensions.
pub fn lemma1_witness(basis: &ConceptBasis, config: &LatentConfig) -> Result<Lemma1Witness> {
    let (d, n) = (basis.dim(), basis.n());
    if n <= d {
        return Err(CrhError::Precondition(format!(
            "non-injectivity needs n > d, got n={n}, d={d}"
        )));
    }
    if config.alpha.len() != n {
        return Err(CrhError::DimensionMismatch {
            expected: n,
            actual: config.alpha.len(),
        });
    }
    let a = basis.operator();
    let ns = null_space(&a);
    let kernel_dim = ns.basis.len();
    if ns.rank > d || kernel_dim < n - d {
        return Err(CrhError::InternalConsistency(format!(
            "rank {} and kernel dimension {kernel_dim} for a {d}x{n} operator",
            ns.rank
        )));
    }
    let gamma = ns.basis[0].normalized()?;
    let residual = kernel_residual(&a, &gamma)?;
    if residual > KERNEL_TOL {
        return Err(CrhError::InternalConsistency(format!("kernel residual {residual:e}")));
    }
    let alpha2: Vec<f64> = config.alpha.iter().zip(gamma.iter()).map(|(x, g)| x + g).collect();
    let other = compose(basis, &alpha2)?;
    Ok(Lemma1Witness {
        gamma: gamma.into_vec(),
        alpha2,
        rank: ns.rank,
        kernel_dim,
        kernel_residual: residual,
        delta_v_d: (&other.v_d - &config.v_d).norm(),
    })
}

/// Orthogonal projector onto the part of `span(vectors)` orthogonal to the
/// unit axis.
pub fn latent_projector(unit_axis: &Vec64, vectors: &[Vec64]) -> Mat64 {
    let perps: Vec<Vec64> = vectors.iter().map(|v| split_on_unit(v, unit_axis).perp).collect();
    let ortho = gram_schmidt(&perps, 1e-10);
    projector(unit_axis.dim(), &ortho)
}

#[derive(Debug, Clone, Serialize)]
pub struct Theorem1Report {
    /// `⟨∇f², ∇g²⟩`.
    pub lhs: f64,
    /// `4 f²(v)`.
    pub rhs: f64,
    pub grad_f_rel_err: f64,
    pub grad_g_rel_err: f64,
}

impl Theorem1Report {
    pub fn identity_rel_err(&self) -> f64 {
        (self.lhs - self.rhs).abs() / self.lhs.abs().max(self.rhs.abs()).max(f64::MIN_POSITIVE)
    }
}

fn quad_form(m: &Mat64, v: &Vec64) -> Result<f64> {
    Ok(v.dot(&m.matvec(v)?))
}

fn grad_rel_err(fd: &Vec64, an: &Vec64, v: &Vec64) -> f64 {
    let scale = an.norm().max(v.norm()).max(f64::MIN_POSITIVE);
    (fd - an).norm() / scale
}

/// Checks `⟨∇f², ∇g²⟩ = 4 f²` for `f² = vᵀPv` and `g² = vᵀQv`, where `Q`
/// projects onto the complement of the axis and `P ⊆ range(Q)`.
pub fn theorem1_check(config: &LatentConfig, p: &Mat64, v: &Vec64) -> Result<Theorem1Report> {
    let d = config.v_d.dim();
    v.check_dim(d)?;
    if p.rows() != d || p.cols() != d {
        return Err(CrhError::DimensionMismatch {
            expected: d,
            actual: p.rows(),
        });
    }
    let axis = config.unit_axis()?;
    let q = axis_complement_projector(&axis);
    let contain = q.matmul(p)?.sub(p)?.max_abs();
    if contain > 1e-10 {
        return Err(CrhError::ContainmentViolation(contain));
    }
    let grad_f = p.matvec(v)?.scaled(2.0);
    let grad_g = q.matvec(v)?.scaled(2.0);
    let lhs = grad_f.dot(&grad_g);
    let rhs = 4.0 * quad_form(p, v)?;

    let h = 1e-5;
    let fd_f = finite_diff_grad(|x: &Vec64| quad_form(p, x).unwrap_or(f64::NAN), v, h)?;
    let fd_g = finite_diff_grad(|x: &Vec64| quad_form(&q, x).unwrap_or(f64::NAN), v, h)?;
    Ok(Theorem1Report {
        lhs,
        rhs,
        grad_f_rel_err: grad_rel_err(&fd_f, &grad_f, v),
        grad_g_rel_err: grad_rel_err(&fd_g, &grad_g, v),
    })
}

/// A pair of latent configurations that agree on every observable yet move
/// the target concept in opposite directions under the same steering vector.
#[derive(Debug, Clone, Serialize)]
pub struct Theorem2Witness {
    pub basis: ConceptBasis,
    pub config_a: LatentConfig,
    pub config_b: LatentConfig,
    pub plane_a: NormalPlane,
    pub plane_b: NormalPlane,
    /// Phase of the shared in-plane steering direction.
    pub phi: f64,
    /// The shared steering vector (unit, in-plane).
    pub v: Vec64,
    pub f_a: f64,
    pub f_b: f64,
    pub delta_v_d: f64,
    pub attempts: usize,
}

pub const THEOREM2_MAX_ATTEMPTS: usize = 64;
const THEOREM2_MARGIN: f64 = 1e-6;

fn attempt_seed(seed: u64, attempt: usize) -> u64 {
    seed.wrapping_mul(0x9E37_79B9_7F4A_7C15) ^ (attempt as u64).wrapping_mul(0xD1B5_4A32_D192_ED03)
}

fn frames_agree(a: &NormalPlane, b: &NormalPlane) -> bool {
    let close = |x: &Vec64, y: &Vec64| (x - y).max_abs() <= 1e-9;
    close(&a.axis, &b.axis) && close(&a.e1, &b.e1) && close(&a.e2, &b.e2)
}

fn theorem2_attempt(d: usize, n: usize, seed: u64) -> std::result::Result<Theorem2Witness, String> {
    let basis = gen_basis(&BasisSpec {
        d,
        n,
        seed,
        coherence: 0.0,
        orthogonalize: false,
        target: 0,
    })
    .map_err(|e| e.to_string())?;
    let mut rng = seeded(seed, Stream::Counterexample);
    let alpha: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
    let c = basis.target();
    if alpha[c].abs() < 0.1 {
        return Err("target strength too small".into());
    }
    let config_a = compose(&basis, &alpha).map_err(|e| e.to_string())?;

    // γ: projection of e_c onto ker(A), i.e. the kernel direction that moves
    // the target strength fastest.
    let ns = null_space(&basis.operator());
    let kernel = gram_schmidt(&ns.basis, 1e-10);
    let mut gamma = Vec64::zeros(n);
    for k in &kernel {
        gamma.axpy(k[c], k);
    }
    if gamma[c] < 1e-3 {
        return Err("target coordinate has no kernel freedom".into());
    }
    // Mirror α_c through the root of the target strength along α + tγ.
    let t = -2.0 * alpha[c] / gamma[c];
    let alpha_b: Vec<f64> = alpha.iter().zip(gamma.iter()).map(|(x, g)| x + t * g).collect();
    let config_b = compose(&basis, &alpha_b).map_err(|e| e.to_string())?;

    let plane_a = normal_plane(&config_a, &basis).map_err(|e| e.to_string())?;
    let plane_b = normal_plane(&config_b, &basis).map_err(|e| e.to_string())?;
    if !frames_agree(&plane_a, &plane_b) {
        return Err("normal planes differ between configurations".into());
    }
    let (_, phi) = plane_a.phasors()[c];
    let v = plane_a.lift([phi.cos(), phi.sin()]);
    let v_perp_norm = split_on_unit(&v, &plane_a.axis).perp.norm();
    let f_a = plane_net_effect(&plane_a, phi, v_perp_norm).map_err(|e| e.to_string())?;
    let f_b = plane_net_effect(&plane_b, phi, v_perp_norm).map_err(|e| e.to_string())?;
    let delta_v_d = (&config_a.v_d - &config_b.v_d).norm();
    if delta_v_d > 1e-9 {
        return Err(format!("difference vectors drift by {delta_v_d:e}"));
    }
    if !(f_a > THEOREM2_MARGIN && f_b < -THEOREM2_MARGIN) {
        return Err(format!("net effects {f_a:e}, {f_b:e} lack the required margin"));
    }
    Ok(Theorem2Witness {
        basis,
        config_a,
        config_b,
        plane_a,
        plane_b,
        phi,
        v,
        f_a,
        f_b,
        delta_v_d,
        attempts: 0,
    })
}

/// Builds a Theorem-2 pair: identical `(v, v_d)` and normal plane, opposite
/// signs of the net target effect. Retries with derived seeds.
pub fn theorem2_counterexample(d: usize, n: usize, seed: u64) -> Result<Theorem2Witness> {
    if d < 3 || n <= d {
        return Err(CrhError::Precondition(format!(
            "counterexample needs n > d >= 3, got n={n}, d={d}"
        )));
    }
    let mut last = String::new();
    for attempt in 0..THEOREM2_MAX_ATTEMPTS {
        match theorem2_attempt(d, n, attempt_seed(seed, attempt)) {
            Ok(mut w) => {
                w.attempts = attempt + 1;
                return Ok(w);
            }
            Err(reason) => {
                log::debug!("theorem2 attempt {attempt}: {reason}");
                last = reason;
            }
        }
    }
    Err(CrhError::ConstructionFailed {
        attempts: THEOREM2_MAX_ATTEMPTS,
        reason: last,
    })
}
