// SPDX-License-Identifier: MIT OR Apache-2.0

//! Principal component analysis on small dense sample sets.
//!
//! Two routes share the Jacobi eigensolver: when there are fewer samples than
//! coordinates the centred Gram matrix (rows × rows) is decomposed and the
//! components are mapped back through the data; otherwise the scatter matrix
//! (cols × cols) is decomposed directly. Both give the same components up to
//! rounding.

use serde::Serialize;

use super::eigen::symmetric_eigen;
use super::matrix::Matrix;
use super::vector::Vector;
use crate::error::{CrhError, Result};
use crate::scalar::Scalar;

#[derive(Debug, Clone, Serialize)]
pub struct PcaResult<T> {
    /// Unit principal directions, descending variance, canonical sign.
    pub components: Vec<Vector<T>>,
    /// Share of the total variance carried by each returned component.
    pub explained_variance_ratio: Vec<T>,
    /// Sample variance (divisor `rows - 1`) along each component.
    pub explained_variance: Vec<T>,
    pub mean: Vector<T>,
    /// Set when the data rank was below the requested `k`; fewer components
    /// than requested are returned.
    pub truncated: bool,
}

impl<T: Scalar> PcaResult<T> {
    pub fn rank(&self) -> usize {
        self.components.len()
    }
}

/// Eigenvalues below `RANK_TOL * largest` are treated as zero.
fn rank_tol<T: Scalar>(rows: usize, cols: usize) -> T {
    T::epsilon() * T::from_count(rows.max(cols)) * T::lit(100.0)
}

/// Mean-centred PCA of the rows of `points`, returning up to `k` components.
pub fn pca<T: Scalar>(points: &Matrix<T>, k: usize) -> Result<PcaResult<T>> {
    let (rows, cols) = (points.rows(), points.cols());
    if rows < 2 {
        return Err(CrhError::Precondition(format!(
            "pca needs at least 2 samples, got {rows}"
        )));
    }
    if k == 0 || k > (rows - 1).min(cols) {
        return Err(CrhError::Precondition(format!(
            "pca k={k} must lie in 1..={}",
            (rows - 1).min(cols)
        )));
    }
    let mean = points.column_means();
    let centered = points.centered(&mean);
    let (values, directions) = top_directions(&centered, k)?;
    let denom = T::from_count(rows - 1);
    let total: T = (0..rows)
        .map(|r| centered.row(r).iter().map(|&x| x * x).sum::<T>())
        .sum();
    let truncated = directions.len() < k;
    let explained_variance_ratio = values
        .iter()
        .map(|&l| if total > T::zero() { l / total } else { T::zero() })
        .collect();
    let explained_variance = values.iter().map(|&l| l / denom).collect();
    if truncated {
        log::warn!(
            "pca: data rank {} below requested k={k}; result truncated",
            directions.len()
        );
    }
    Ok(PcaResult {
        components: directions,
        explained_variance_ratio,
        explained_variance,
        mean,
        truncated,
    })
}

/// Leading second-moment directions of a set of vectors (no centring).
///
/// Returns the eigenvalues of `Σ xᵢxᵢᵀ` and the unit directions, dropping
/// numerically null directions.
pub fn uncentered_directions<T: Scalar>(vectors: &[Vector<T>], k: usize) -> Result<(Vec<T>, Vec<Vector<T>>)> {
    if vectors.is_empty() {
        return Ok((Vec::new(), Vec::new()));
    }
    let m = Matrix::from_rows(vectors)?;
    top_directions(&m, k)
}

/// Top-`k` right singular directions of `x` with squared singular values.
fn top_directions<T: Scalar>(x: &Matrix<T>, k: usize) -> Result<(Vec<T>, Vec<Vector<T>>)> {
    let (rows, cols) = (x.rows(), x.cols());
    let tol = rank_tol::<T>(rows, cols);
    let mut values = Vec::with_capacity(k);
    let mut dirs = Vec::with_capacity(k);
    if rows < cols {
        let eig = symmetric_eigen(&x.gram())?;
        let lead = eig.values.first().copied().unwrap_or(T::zero());
        for (lam, u) in eig.values.into_iter().zip(eig.vectors).take(k) {
            if !(lam > tol * lead) || lam <= T::zero() {
                break;
            }
            // component = Xᵀu / ‖Xᵀu‖
            let mut c = Vector::zeros(cols);
            for r in 0..rows {
                let w = u[r];
                for (ci, &xv) in c.as_mut_slice().iter_mut().zip(x.row(r)) {
                    *ci += w * xv;
                }
            }
            let c = c.normalized()?.canonical_sign();
            values.push(lam);
            dirs.push(c);
        }
    } else {
        let eig = symmetric_eigen(&x.scatter())?;
        let lead = eig.values.first().copied().unwrap_or(T::zero());
        for (lam, v) in eig.values.into_iter().zip(eig.vectors).take(k) {
            if !(lam > tol * lead) || lam <= T::zero() {
                break;
            }
            values.push(lam);
            dirs.push(v.canonical_sign());
        }
    }
    Ok((values, dirs))
}
