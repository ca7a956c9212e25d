// SPDX-License-Identifier: MIT OR Apache-2.0

//! Synthetic concept models: bases, latent strengths, the cylindrical frame
//! they induce, and constructive checks of the predictability results.

mod basis;
mod latent;
mod model;
mod plane;
mod scenario;
mod sector;
mod theory;

pub(crate) use basis::gaussian_unit;
pub use basis::{gen_basis, BasisSpec, ConceptBasis};
pub use latent::{compose, split_concepts, ConceptSplit, LatentConfig};
pub use model::SyntheticModel;
pub use plane::{normal_plane, wrap_phase, Decomposition, NormalPlane};
pub use scenario::{AlphaSpec, Scenario, ScenarioConfig};
pub use sector::{
    interference_phasor, min_norm_coefficients, net_effect, plane_net_effect, sector, sector_from_parts, SectorLabel,
    SectorReport, SectorRule,
};
pub use theory::{
    latent_projector, lemma1_witness, theorem1_check, theorem2_counterexample, Lemma1Witness, Theorem1Report,
    Theorem2Witness, THEOREM2_MAX_ATTEMPTS,
};
