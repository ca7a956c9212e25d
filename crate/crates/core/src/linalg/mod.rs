// SPDX-License-Identifier: MIT OR Apache-2.0

//! Dense linear algebra for representation-space geometry.

mod eigen;
mod matrix;
mod pca;
mod project;
mod vector;

pub use eigen::{symmetric_eigen, SymmetricEigen};
pub use matrix::Matrix;
pub use pca::{pca, uncentered_directions, PcaResult};
pub use project::{
    axis_complement_projector, axis_decompose, gram_schmidt, null_space, projector, reject_from, split_on_unit,
    AxisSplit, NullSpace,
};
pub use vector::Vector;
