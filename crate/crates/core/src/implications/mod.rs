// SPDX-License-Identifier: MIT OR Apache-2.0

//! Steerability and the three implication checks: penalty trade-off,
//! angular power-law correlation, and similarity transfer.

mod judge;
mod penalty;
mod scan;
mod transfer;

pub use judge::{judge, OutcomeLabel};
pub use penalty::{
    emergence_strength, penalty_grid, steerability, steering_scenario, success_curve, GridSpec, PenaltyGrid,
    SteerabilityScore, SteeringScenario, SteeringSetup, SuccessCurve,
};
pub use scan::{
    correlation_scan, m_grid, power_law_samples, Aggregation, PowerLawSpec, ScanConfig, ScanNormalization, ScanResult,
    ScanSample,
};
pub use transfer::{null_transfer_samples, similarity_transfer, NullTransferSpec, TransferPairs, TransferSample};
