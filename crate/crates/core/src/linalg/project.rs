// SPDX-License-Identifier: MIT OR Apache-2.0

//! Axis projections, Gram–Schmidt and null spaces.

use super::matrix::Matrix;
use super::vector::Vector;
use crate::error::{CrhError, Result};
use crate::scalar::Scalar;

/// `v = axial · unit(axis) + perp` with `perp ⟂ axis`.
#[derive(Debug, Clone, PartialEq)]
pub struct AxisSplit<T> {
    pub axial: T,
    pub perp: Vector<T>,
}

pub fn axis_decompose<T: Scalar>(v: &Vector<T>, axis: &Vector<T>) -> Result<AxisSplit<T>> {
    v.check_dim(axis.dim())?;
    let unit = axis
        .normalized()
        .map_err(|_| CrhError::DegenerateAxis("zero axis".into()))?;
    Ok(split_on_unit(v, &unit))
}

/// Same as [`axis_decompose`] for an axis already known to be unit length.
pub fn split_on_unit<T: Scalar>(v: &Vector<T>, unit: &Vector<T>) -> AxisSplit<T> {
    let axial = v.dot(unit);
    let mut perp = v.clone();
    perp.axpy(-axial, unit);
    AxisSplit { axial, perp }
}

/// Orthonormalises `vectors` in order (modified Gram–Schmidt, two passes),
/// skipping any vector whose residual falls below `tol · ‖v‖`.
pub fn gram_schmidt<T: Scalar>(vectors: &[Vector<T>], tol: T) -> Vec<Vector<T>> {
    let mut basis: Vec<Vector<T>> = Vec::new();
    for v in vectors {
        let scale = v.norm();
        if !(scale > T::zero()) {
            continue;
        }
        let mut w = v.clone();
        for _ in 0..2 {
            for b in &basis {
                let c = w.dot(b);
                w.axpy(-c, b);
            }
        }
        let n = w.norm();
        if n > tol * scale {
            basis.push(w.scaled(T::one() / n));
        }
    }
    basis
}

/// Removes the components of `v` along each (orthonormal) basis vector.
pub fn reject_from<T: Scalar>(v: &Vector<T>, orthonormal: &[Vector<T>]) -> Vector<T> {
    let mut w = v.clone();
    for _ in 0..2 {
        for b in orthonormal {
            let c = w.dot(b);
            w.axpy(-c, b);
        }
    }
    w
}

/// Orthogonal projector `U Uᵀ` onto the span of an orthonormal set.
pub fn projector<T: Scalar>(dim: usize, orthonormal: &[Vector<T>]) -> Matrix<T> {
    let mut p = Matrix::zeros(dim, dim);
    for u in orthonormal {
        for i in 0..dim {
            for j in 0..dim {
                let x = p.get(i, j) + u[i] * u[j];
                p.set(i, j, x);
            }
        }
    }
    p
}

/// `I − a aᵀ` for a unit axis `a`.
pub fn axis_complement_projector<T: Scalar>(unit_axis: &Vector<T>) -> Matrix<T> {
    let d = unit_axis.dim();
    let mut q = Matrix::identity(d);
    for i in 0..d {
        for j in 0..d {
            let x = q.get(i, j) - unit_axis[i] * unit_axis[j];
            q.set(i, j, x);
        }
    }
    q
}

/// Null space of `a` by Gaussian elimination with partial pivoting.
#[derive(Debug, Clone)]
pub struct NullSpace<T> {
    pub rank: usize,
    /// Basis of `ker(a)`, one vector per free column (not orthonormalised).
    pub basis: Vec<Vector<T>>,
}

pub fn null_space<T: Scalar>(a: &Matrix<T>) -> NullSpace<T> {
    let (rows, cols) = (a.rows(), a.cols());
    let mut m = a.clone();
    let tol = T::epsilon() * T::from_count(rows.max(cols)) * T::lit(16.0) * (m.max_abs() + T::min_positive_value());
    let mut pivots: Vec<usize> = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let (mut best, mut best_abs) = (r, m.get(r, c).abs());
        for i in (r + 1)..rows {
            if m.get(i, c).abs() > best_abs {
                best = i;
                best_abs = m.get(i, c).abs();
            }
        }
        if best_abs <= tol {
            continue;
        }
        if best != r {
            for j in 0..cols {
                let t = m.get(r, j);
                m.set(r, j, m.get(best, j));
                m.set(best, j, t);
            }
        }
        let p = m.get(r, c);
        for j in 0..cols {
            m.set(r, j, m.get(r, j) / p);
        }
        for i in 0..rows {
            if i == r {
                continue;
            }
            let f = m.get(i, c);
            if f == T::zero() {
                continue;
            }
            for j in 0..cols {
                let x = m.get(i, j) - f * m.get(r, j);
                m.set(i, j, x);
            }
        }
        pivots.push(c);
        r += 1;
    }
    let free: Vec<usize> = (0..cols).filter(|c| !pivots.contains(c)).collect();
    let basis = free
        .iter()
        .map(|&f| {
            let mut v = Vector::zeros(cols);
            v[f] = T::one();
            for (row, &pc) in pivots.iter().enumerate() {
                v[pc] = -m.get(row, f);
            }
            v
        })
        .collect();
    NullSpace {
        rank: pivots.len(),
        basis,
    }
}
