// SPDX-License-Identifier: MIT OR Apache-2.0

//! Central finite differences.

use crate::error::{CrhError, Result};
use crate::linalg::Vector;
use crate::scalar::Scalar;

/// Gradient of a scalar field by central differences with step `h`.
pub fn finite_diff_grad<T, F>(f: F, v: &Vector<T>, h: T) -> Result<Vector<T>>
where
    T: Scalar,
    F: Fn(&Vector<T>) -> T,
{
    if !(h > T::zero()) {
        return Err(CrhError::InvalidArgument("finite-difference step must be > 0".into()));
    }
    let two_h = h + h;
    let mut probe = v.clone();
    let mut grad = Vector::zeros(v.dim());
    for i in 0..v.dim() {
        let x = v[i];
        probe[i] = x + h;
        let fp = f(&probe);
        probe[i] = x - h;
        let fm = f(&probe);
        probe[i] = x;
        if !fp.is_finite() || !fm.is_finite() {
            return Err(CrhError::NonFinite(format!("field evaluation near coordinate {i}")));
        }
        grad[i] = (fp - fm) / two_h;
    }
    Ok(grad)
}
