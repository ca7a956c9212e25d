// SPDX-License-Identifier: MIT OR Apache-2.0

//! Row-major dense matrices.

use serde::{Deserialize, Serialize};

use super::vector::Vector;
use crate::error::{CrhError, Result};
use crate::scalar::Scalar;

/// Row-major dense matrix. Rows are samples, columns are coordinates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Matrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T: Scalar> Matrix<T> {
    pub fn new(rows: usize, cols: usize, data: Vec<T>) -> Result<Self> {
        if rows * cols != data.len() {
            return Err(CrhError::InvalidArgument(format!(
                "matrix {rows}x{cols} needs {} values, got {}",
                rows * cols,
                data.len()
            )));
        }
        if let Some(i) = data.iter().position(|x| !x.is_finite()) {
            return Err(CrhError::NonFinite(format!(
                "matrix entry ({}, {})",
                i / cols.max(1),
                i % cols.max(1)
            )));
        }
        Ok(Self { rows, cols, data })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![T::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, T::one());
        }
        m
    }

    /// Stacks vectors as rows. All vectors must share a dimension.
    pub fn from_rows(rows: &[Vector<T>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vector::dim);
        let mut data = Vec::with_capacity(rows.len() * cols);
        for r in rows {
            r.check_dim(cols)?;
            data.extend_from_slice(r.as_slice());
        }
        Ok(Self {
            rows: rows.len(),
            cols,
            data,
        })
    }

    /// Places vectors as columns.
    pub fn from_columns(cols: &[Vector<T>]) -> Result<Self> {
        Ok(Self::from_rows(cols)?.transpose())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn data(&self) -> &[T] {
        &self.data
    }

    pub fn into_data(self) -> Vec<T> {
        self.data
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> T {
        self.data[r * self.cols + c]
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, x: T) {
        self.data[r * self.cols + c] = x;
    }

    pub fn row(&self, r: usize) -> &[T] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn row_vector(&self, r: usize) -> Vector<T> {
        self.row(r).to_vec().into()
    }

    pub fn column_vector(&self, c: usize) -> Vector<T> {
        (0..self.rows).map(|r| self.get(r, c)).collect()
    }

    pub fn row_vectors(&self) -> Vec<Vector<T>> {
        (0..self.rows).map(|r| self.row_vector(r)).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                t.set(c, r, self.get(r, c));
            }
        }
        t
    }

    pub fn matvec(&self, v: &Vector<T>) -> Result<Vector<T>> {
        v.check_dim(self.cols)?;
        Ok((0..self.rows)
            .map(|r| self.row(r).iter().zip(v.iter()).map(|(&a, &b)| a * b).sum::<T>())
            .collect())
    }

    pub fn matmul(&self, other: &Self) -> Result<Self> {
        if self.cols != other.rows {
            return Err(CrhError::DimensionMismatch {
                expected: self.cols,
                actual: other.rows,
            });
        }
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a == T::zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let idx = i * other.cols + j;
                    out.data[idx] += a * other.get(k, j);
                }
            }
        }
        Ok(out)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(CrhError::DimensionMismatch {
                expected: self.rows * self.cols,
                actual: other.rows * other.cols,
            });
        }
        Ok(Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(&a, &b)| a - b).collect(),
        })
    }

    pub fn column_means(&self) -> Vector<T> {
        let mut mean = Vector::zeros(self.cols);
        if self.rows == 0 {
            return mean;
        }
        for r in 0..self.rows {
            for (m, &x) in mean.as_mut_slice().iter_mut().zip(self.row(r)) {
                *m += x;
            }
        }
        mean.scaled(T::one() / T::from_count(self.rows))
    }

    /// Subtracts `offset` from every row.
    pub fn centered(&self, offset: &Vector<T>) -> Self {
        let mut out = self.clone();
        for r in 0..self.rows {
            for (x, &m) in out.data[r * self.cols..(r + 1) * self.cols]
                .iter_mut()
                .zip(offset.iter())
            {
                *x -= m;
            }
        }
        out
    }

    /// `X Xᵀ` (rows × rows).
    pub fn gram(&self) -> Self {
        let mut g = Self::zeros(self.rows, self.rows);
        for i in 0..self.rows {
            for j in i..self.rows {
                let s: T = self.row(i).iter().zip(self.row(j)).map(|(&a, &b)| a * b).sum();
                g.set(i, j, s);
                g.set(j, i, s);
            }
        }
        g
    }

    /// `Xᵀ X` (cols × cols).
    pub fn scatter(&self) -> Self {
        let mut s = Self::zeros(self.cols, self.cols);
        for r in 0..self.rows {
            let row = self.row(r);
            for i in 0..self.cols {
                let a = row[i];
                if a == T::zero() {
                    continue;
                }
                for (j, &b) in row.iter().enumerate().skip(i) {
                    s.data[i * self.cols + j] += a * b;
                }
            }
        }
        for i in 0..self.cols {
            for j in 0..i {
                let x = s.get(j, i);
                s.set(i, j, x);
            }
        }
        s
    }

    pub fn max_abs(&self) -> T {
        self.data
            .iter()
            .fold(T::zero(), |m, &x| if x.abs() > m { x.abs() } else { m })
    }

    pub fn widen(&self) -> Matrix<f64> {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|x| x.widen()).collect(),
        }
    }

    pub fn cast<U: Scalar>(&self) -> Matrix<U> {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|x| U::lit(x.widen())).collect(),
        }
    }
}
