// SPDX-License-Identifier: MIT OR Apache-2.0

//! Outcome labels for steered states of the synthetic model.

use serde::{Deserialize, Serialize};

use crate::synthetic::SyntheticModel;
use crate::Vec64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OutcomeLabel {
    Normal,
    Target,
    Corrupted,
}

/// Corrupted when the state leaves the concept span around the origin by
/// more than `τ_x`; otherwise target when its gain along the target
/// direction reaches `τ_c`.
pub fn judge(model: &SyntheticModel, state: &Vec64) -> OutcomeLabel {
    let Ok(off) = model.off_span_distance(state) else {
        return OutcomeLabel::Corrupted;
    };
    if off > model.tau_x {
        return OutcomeLabel::Corrupted;
    }
    let gain = (state - &model.origin).dot(model.basis.target_direction());
    if gain >= model.tau_c {
        OutcomeLabel::Target
    } else {
        OutcomeLabel::Normal
    }
}
