// SPDX-License-Identifier: MIT OR Apache-2.0

//! Crate-wide error type.

use thiserror::Error;

/// Errors produced by geometry, theory, probing and IO routines.
#[derive(Debug, Error)]
#[non_exhaustive]
pub enum CrhError {
    #[error("degenerate axis: {0}")]
    DegenerateAxis(String),

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("non-finite value: {0}")]
    NonFinite(String),

    #[error("undefined correlation: {0}")]
    UndefinedCorrelation(String),

    #[error("degenerate fit: {0}")]
    DegenerateFit(String),

    #[error("normal plane undefined: {0}")]
    PlaneUndefined(String),

    #[error("sector undefined: {0}")]
    SectorUndefined(String),

    #[error("projector not contained in the axis complement (max |QP - P| = {0:e})")]
    ContainmentViolation(f64),

    #[error("internal consistency check failed: {0}")]
    InternalConsistency(String),

    #[error("construction failed after {attempts} attempts: {reason}")]
    ConstructionFailed { attempts: usize, reason: String },

    #[error("degenerate cylinder: rank {rank} < 3")]
    DegenerateCylinder { rank: usize },

    #[error("gradient not available from this loss oracle")]
    GradientUnavailable,

    #[error("bad magic: expected ACTV1")]
    BadMagic,

    #[error("truncated payload: expected {expected} bytes, found {actual}")]
    Truncated { expected: usize, actual: usize },

    #[error("trailing bytes after payload: expected {expected} bytes, found {actual}")]
    TrailingBytes { expected: usize, actual: usize },

    #[error("malformed header: {0}")]
    MalformedHeader(String),

    #[error("verification failed: {0}")]
    CheckFailed(String),

    #[error("config schema violation: {0}")]
    Schema(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

/// Broad error classes used for process exit codes and error reports.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorClass {
    Schema,
    Data,
    Numerical,
}

impl ErrorClass {
    pub fn exit_code(self) -> i32 {
        match self {
            ErrorClass::Schema => 2,
            ErrorClass::Data => 3,
            ErrorClass::Numerical => 4,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            ErrorClass::Schema => "schema",
            ErrorClass::Data => "data",
            ErrorClass::Numerical => "numerical",
        }
    }
}

impl CrhError {
    pub fn class(&self) -> ErrorClass {
        use CrhError::*;
        match self {
            Schema(_) => ErrorClass::Schema,
            DimensionMismatch { .. }
            | InvalidArgument(_)
            | Precondition(_)
            | BadMagic
            | Truncated { .. }
            | TrailingBytes { .. }
            | MalformedHeader(_)
            | Io(_)
            | Json(_) => ErrorClass::Data,
            _ => ErrorClass::Numerical,
        }
    }
}

pub type Result<T> = std::result::Result<T, CrhError>;
