// SPDX-License-Identifier: MIT OR Apache-2.0

//! Symmetric eigendecomposition by cyclic Jacobi rotations.

use super::matrix::Matrix;
use super::vector::Vector;
use crate::error::{CrhError, Result};
use crate::scalar::Scalar;

const MAX_SWEEPS: usize = 100;

/// Eigenpairs of a symmetric matrix, eigenvalues in descending order.
#[derive(Debug, Clone)]
pub struct SymmetricEigen<T> {
    pub values: Vec<T>,
    /// Unit eigenvectors, `vectors[j]` pairs with `values[j]`.
    pub vectors: Vec<Vector<T>>,
}

/// Decomposes a symmetric matrix. Only the upper triangle is trusted to be
/// consistent with the lower one; asymmetric input is rejected.
pub fn symmetric_eigen<T: Scalar>(m: &Matrix<T>) -> Result<SymmetricEigen<T>> {
    let n = m.rows();
    if n != m.cols() {
        return Err(CrhError::DimensionMismatch {
            expected: n,
            actual: m.cols(),
        });
    }
    let scale = m.max_abs();
    let sym_tol = T::lit(1e3) * T::epsilon() * (scale + T::one());
    for i in 0..n {
        for j in 0..i {
            if (m.get(i, j) - m.get(j, i)).abs() > sym_tol {
                return Err(CrhError::InvalidArgument(format!("matrix not symmetric at ({i}, {j})")));
            }
        }
    }

    let mut a = m.clone();
    let mut v = Matrix::<T>::identity(n);

    if scale > T::zero() {
        let two = T::lit(2.0);
        for _ in 0..MAX_SWEEPS {
            let mut off = T::zero();
            let mut diag = T::zero();
            for i in 0..n {
                diag += a.get(i, i) * a.get(i, i);
                for j in (i + 1)..n {
                    off += a.get(i, j) * a.get(i, j);
                }
            }
            if off.sqrt() <= T::epsilon() * (diag + two * off).sqrt() * T::lit(0.1) {
                break;
            }
            for p in 0..n {
                for q in (p + 1)..n {
                    let apq = a.get(p, q);
                    if apq == T::zero() {
                        continue;
                    }
                    let app = a.get(p, p);
                    let aqq = a.get(q, q);
                    let theta = (aqq - app) / (two * apq);
                    let t = theta.signum() / (theta.abs() + (theta * theta + T::one()).sqrt());
                    let c = T::one() / (t * t + T::one()).sqrt();
                    let s = t * c;
                    for k in 0..n {
                        let akp = a.get(k, p);
                        let akq = a.get(k, q);
                        a.set(k, p, c * akp - s * akq);
                        a.set(k, q, s * akp + c * akq);
                    }
                    for k in 0..n {
                        let apk = a.get(p, k);
                        let aqk = a.get(q, k);
                        a.set(p, k, c * apk - s * aqk);
                        a.set(q, k, s * apk + c * aqk);
                    }
                    for k in 0..n {
                        let vkp = v.get(k, p);
                        let vkq = v.get(k, q);
                        v.set(k, p, c * vkp - s * vkq);
                        v.set(k, q, s * vkp + c * vkq);
                    }
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| {
        a.get(j, j)
            .partial_cmp(&a.get(i, i))
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(i.cmp(&j))
    });
    let values = order.iter().map(|&i| a.get(i, i)).collect();
    let vectors = order.iter().map(|&i| v.column_vector(i)).collect();
    Ok(SymmetricEigen { values, vectors })
}
