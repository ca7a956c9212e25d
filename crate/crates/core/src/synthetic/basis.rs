// SPDX-License-Identifier: MIT OR Apache-2.0

//! Concept bases: `n` unit directions in `d` dimensions.

use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{CrhError, Result};
use crate::linalg::{gram_schmidt, Matrix};
use crate::rng::{seeded, Stream};
use crate::{Mat64, Vec64};

const UNIT_TOL: f64 = 1e-10;

/// Concept directions (columns of the concept operator) and the target id.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConceptBasis {
    dim: usize,
    directions: Vec<Vec64>,
    target: usize,
}

impl ConceptBasis {
    pub fn new(directions: Vec<Vec64>, target: usize) -> Result<Self> {
        let n = directions.len();
        if n == 0 {
            return Err(CrhError::InvalidArgument("basis needs at least one concept".into()));
        }
        if target >= n {
            return Err(CrhError::InvalidArgument(format!(
                "target index {target} out of range for {n} concepts"
            )));
        }
        let dim = directions[0].dim();
        if dim < 2 {
            return Err(CrhError::InvalidArgument("ambient dimension must be >= 2".into()));
        }
        for (i, a) in directions.iter().enumerate() {
            a.check_dim(dim)?;
            if (a.norm() - 1.0).abs() > UNIT_TOL {
                return Err(CrhError::InvalidArgument(format!(
                    "concept direction {i} has norm {}",
                    a.norm()
                )));
            }
        }
        Ok(Self {
            dim,
            directions,
            target,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn n(&self) -> usize {
        self.directions.len()
    }

    pub fn target(&self) -> usize {
        self.target
    }

    pub fn directions(&self) -> &[Vec64] {
        &self.directions
    }

    pub fn direction(&self, i: usize) -> &Vec64 {
        &self.directions[i]
    }

    pub fn target_direction(&self) -> &Vec64 {
        &self.directions[self.target]
    }

    /// The `d × n` operator whose columns are the concept directions.
    pub fn operator(&self) -> Mat64 {
        Matrix::from_columns(&self.directions).expect("directions share a dimension")
    }

    pub fn with_target(mut self, target: usize) -> Result<Self> {
        if target >= self.n() {
            return Err(CrhError::InvalidArgument(format!("target {target} out of range")));
        }
        self.target = target;
        Ok(self)
    }
}

/// Recipe for a seeded random basis.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BasisSpec {
    pub d: usize,
    pub n: usize,
    pub seed: u64,
    /// In `[0, 1)`: weight of a shared direction mixed into every concept.
    #[serde(default)]
    pub coherence: f64,
    /// Gram–Schmidt the first `min(n, d)` directions.
    #[serde(default)]
    pub orthogonalize: bool,
    #[serde(default)]
    pub target: usize,
}

pub(crate) fn gaussian_unit(rng: &mut ChaCha8Rng, d: usize) -> Vec64 {
    loop {
        let g: Vec64 = (0..d).map(|_| StandardNormal.sample(rng)).collect();
        if let Ok(u) = g.normalized() {
            return u;
        }
    }
}

/// Draws a concept basis. Deterministic in `spec.seed`.
pub fn gen_basis(spec: &BasisSpec) -> Result<ConceptBasis> {
    let BasisSpec {
        d,
        n,
        seed,
        coherence,
        orthogonalize,
        target,
    } = *spec;
    if d < 2 || n < 1 {
        return Err(CrhError::InvalidArgument(format!(
            "basis needs d >= 2 and n >= 1, got d={d}, n={n}"
        )));
    }
    if !(0.0..1.0).contains(&coherence) {
        return Err(CrhError::InvalidArgument(format!(
            "coherence {coherence} outside [0, 1)"
        )));
    }
    let mut rng = seeded(seed, Stream::Basis);
    let shared = gaussian_unit(&mut rng, d);
    let mut dirs: Vec<Vec64> = (0..n)
        .map(|_| {
            let g = gaussian_unit(&mut rng, d);
            if coherence == 0.0 {
                return g;
            }
            let mut mixed = g.scaled(1.0 - coherence);
            mixed.axpy(coherence, &shared);
            mixed.normalized().unwrap_or(g)
        })
        .collect();
    if orthogonalize {
        let m = n.min(d);
        let ortho = gram_schmidt(&dirs[..m], 1e-8);
        if ortho.len() == m {
            dirs.splice(..m, ortho);
        } else {
            return Err(CrhError::InternalConsistency(
                "random directions were numerically dependent".into(),
            ));
        }
    }
    ConceptBasis::new(dirs, target)
}
