// SPDX-License-Identifier: MIT OR Apache-2.0

//! Dense real vectors.

use std::ops::{Add, Index, IndexMut, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::error::{CrhError, Result};
use crate::scalar::Scalar;

/// A dense vector in representation space.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Vector<T> {
    values: Vec<T>,
}

impl<T: Scalar> Vector<T> {
    /// Builds a representation-space vector, rejecting non-finite entries and
    /// dimensions below 2.
    pub fn try_new(values: Vec<T>) -> Result<Self> {
        if values.len() < 2 {
            return Err(CrhError::InvalidArgument(format!(
                "vector dimension must be >= 2, got {}",
                values.len()
            )));
        }
        if let Some(i) = values.iter().position(|x| !x.is_finite()) {
            return Err(CrhError::NonFinite(format!("vector entry {i}")));
        }
        Ok(Self { values })
    }

    pub fn zeros(dim: usize) -> Self {
        Self {
            values: vec![T::zero(); dim],
        }
    }

    /// The `i`-th standard basis vector.
    pub fn basis(dim: usize, i: usize) -> Self {
        let mut v = Self::zeros(dim);
        v.values[i] = T::one();
        v
    }

    pub fn dim(&self) -> usize {
        self.values.len()
    }

    pub fn as_slice(&self) -> &[T] {
        &self.values
    }

    pub fn as_mut_slice(&mut self) -> &mut [T] {
        &mut self.values
    }

    pub fn into_vec(self) -> Vec<T> {
        self.values
    }

    pub fn iter(&self) -> std::slice::Iter<'_, T> {
        self.values.iter()
    }

    pub fn dot(&self, other: &Self) -> T {
        debug_assert_eq!(self.dim(), other.dim());
        self.values.iter().zip(&other.values).map(|(&a, &b)| a * b).sum()
    }

    pub fn norm_sq(&self) -> T {
        self.dot(self)
    }

    pub fn norm(&self) -> T {
        self.norm_sq().sqrt()
    }

    pub fn scaled(&self, s: T) -> Self {
        self.values.iter().map(|&x| x * s).collect()
    }

    /// `self += s * other`
    pub fn axpy(&mut self, s: T, other: &Self) {
        debug_assert_eq!(self.dim(), other.dim());
        for (a, &b) in self.values.iter_mut().zip(&other.values) {
            *a += s * b;
        }
    }

    /// Unit vector in the same direction.
    pub fn normalized(&self) -> Result<Self> {
        let n = self.norm();
        if !(n > T::zero()) || !n.is_finite() {
            return Err(CrhError::DegenerateAxis("cannot normalise a zero vector".into()));
        }
        Ok(self.scaled(T::one() / n))
    }

    pub fn cosine(&self, other: &Self) -> Option<T> {
        let denom = self.norm() * other.norm();
        (denom > T::zero()).then(|| self.dot(other) / denom)
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|x| x.is_finite())
    }

    pub fn max_abs(&self) -> T {
        self.values
            .iter()
            .fold(T::zero(), |m, &x| if x.abs() > m { x.abs() } else { m })
    }

    /// Flips the sign so that the entry of largest magnitude is positive.
    /// Ties resolve to the lowest index.
    pub fn canonical_sign(mut self) -> Self {
        let mut best = 0;
        for (i, x) in self.values.iter().enumerate() {
            if x.abs() > self.values[best].abs() {
                best = i;
            }
        }
        if self.values.get(best).is_some_and(|&x| x < T::zero()) {
            for x in &mut self.values {
                *x = -*x;
            }
        }
        self
    }

    pub fn check_dim(&self, expected: usize) -> Result<()> {
        if self.dim() == expected {
            Ok(())
        } else {
            Err(CrhError::DimensionMismatch {
                expected,
                actual: self.dim(),
            })
        }
    }

    pub fn widen(&self) -> Vector<f64> {
        self.values.iter().map(|x| x.widen()).collect()
    }

    pub fn cast<U: Scalar>(&self) -> Vector<U> {
        self.values.iter().map(|x| U::lit(x.widen())).collect()
    }
}

impl<T> From<Vec<T>> for Vector<T> {
    fn from(values: Vec<T>) -> Self {
        Self { values }
    }
}

impl<T> FromIterator<T> for Vector<T> {
    fn from_iter<I: IntoIterator<Item = T>>(iter: I) -> Self {
        Self {
            values: iter.into_iter().collect(),
        }
    }
}

impl<T> Index<usize> for Vector<T> {
    type Output = T;
    fn index(&self, i: usize) -> &T {
        &self.values[i]
    }
}

impl<T> IndexMut<usize> for Vector<T> {
    fn index_mut(&mut self, i: usize) -> &mut T {
        &mut self.values[i]
    }
}

impl<T: Scalar> Add for &Vector<T> {
    type Output = Vector<T>;
    fn add(self, rhs: Self) -> Vector<T> {
        debug_assert_eq!(self.dim(), rhs.dim());
        self.values.iter().zip(&rhs.values).map(|(&a, &b)| a + b).collect()
    }
}

impl<T: Scalar> Sub for &Vector<T> {
    type Output = Vector<T>;
    fn sub(self, rhs: Self) -> Vector<T> {
        debug_assert_eq!(self.dim(), rhs.dim());
        self.values.iter().zip(&rhs.values).map(|(&a, &b)| a - b).collect()
    }
}

impl<T: Scalar> Mul<T> for &Vector<T> {
    type Output = Vector<T>;
    fn mul(self, rhs: T) -> Vector<T> {
        self.scaled(rhs)
    }
}

impl<T: Scalar> Neg for &Vector<T> {
    type Output = Vector<T>;
    fn neg(self) -> Vector<T> {
        self.values.iter().map(|&x| -x).collect()
    }
}
