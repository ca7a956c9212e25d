// SPDX-License-Identifier: MIT OR Apache-2.0

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod implications;
pub mod io;
pub mod linalg;
pub mod numdiff;
pub mod oracle;
pub mod pipeline;
pub mod probing;
pub mod rng;
pub mod scalar;
pub mod stats;
pub mod steering;
pub mod synthetic;
pub mod verify;

pub use error::{CrhError, ErrorClass, Result};
pub use linalg::{Matrix, Vector};
pub use scalar::Scalar;

pub type Vec64 = Vector<f64>;
pub type Vec32 = Vector<f32>;
pub type Mat64 = Matrix<f64>;
pub type Mat32 = Matrix<f32>;
