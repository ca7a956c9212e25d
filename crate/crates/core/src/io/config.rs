// SPDX-License-Identifier: MIT OR Apache-2.0

//! Run configuration: every knob of a pipeline run in one document, loaded
//! from TOML or JSON and identified by a content hash.

use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{CrhError, Result};
use crate::implications::{GridSpec, NullTransferSpec, PowerLawSpec, ScanConfig, SteeringSetup};
use crate::probing::ProbeSettings;
use crate::steering::{BuildOptions, Method};
use crate::synthetic::{AlphaSpec, ScenarioConfig};

/// JSON Schema for [`RunConfig`].
pub const SCHEMA: &str = include_str!("../../schema/run-config.schema.json");

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scheme {
    AllPrompt,
    LastPrompt,
    AllOutput,
    AllTokens,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelFamily {
    Gemma,
    Llama,
}

/// Maximum steering factor per token-position scheme.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SchemeFactors {
    pub all_prompt: f64,
    pub last_prompt: f64,
    pub all_output: f64,
    pub all_tokens: f64,
}

impl SchemeFactors {
    pub fn get(&self, scheme: Scheme) -> f64 {
        match scheme {
            Scheme::AllPrompt => self.all_prompt,
            Scheme::LastPrompt => self.last_prompt,
            Scheme::AllOutput => self.all_output,
            Scheme::AllTokens => self.all_tokens,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LambdaTable {
    pub gemma: SchemeFactors,
    pub llama: SchemeFactors,
}

impl Default for LambdaTable {
    fn default() -> Self {
        Self {
            gemma: SchemeFactors {
                all_prompt: 5.0,
                last_prompt: 50.0,
                all_output: 50.0,
                all_tokens: 3.0,
            },
            llama: SchemeFactors {
                all_prompt: 5.0,
                last_prompt: 80.0,
                all_output: 80.0,
                all_tokens: 3.0,
            },
        }
    }
}

impl LambdaTable {
    pub fn get(&self, family: ModelFamily, scheme: Scheme) -> f64 {
        match family {
            ModelFamily::Gemma => self.gemma.get(scheme),
            ModelFamily::Llama => self.llama.get(scheme),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SteeringSection {
    pub methods: Vec<Method>,
    pub build: BuildOptions,
    /// Synthetic contrastive pairs drawn when no ACTV1 inputs are given.
    pub pairs: usize,
    pub noise: f64,
    pub family: ModelFamily,
    pub scheme: Scheme,
    pub lambda_max: LambdaTable,
}

impl Default for SteeringSection {
    fn default() -> Self {
        Self {
            methods: Method::ALL.to_vec(),
            build: BuildOptions::default(),
            pairs: 100,
            noise: 0.1,
            family: ModelFamily::Gemma,
            scheme: Scheme::LastPrompt,
            lambda_max: LambdaTable::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Implication1Section {
    pub rho_steps: usize,
    pub lambda_steps: usize,
    /// Fixed `λ_max`; when absent it is `lambda_max_scale` times the
    /// strength at which the fully penalized vector reaches every sample.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lambda_max: Option<f64>,
    pub lambda_max_scale: f64,
    /// Fraction of samples that defines an onset.
    pub onset_level: f64,
    pub setup: SteeringSetup,
}

impl Default for Implication1Section {
    fn default() -> Self {
        Self {
            rho_steps: 25,
            lambda_steps: 25,
            lambda_max: None,
            lambda_max_scale: 1.5,
            onset_level: 0.5,
            setup: SteeringSetup::default(),
        }
    }
}

impl Implication1Section {
    pub fn grid(&self, full_penalty_reach: f64) -> GridSpec {
        GridSpec {
            rho_steps: self.rho_steps,
            lambda_steps: self.lambda_steps,
            lambda_max: self.lambda_max.unwrap_or(self.lambda_max_scale * full_penalty_reach),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Implication2Section {
    pub generator: PowerLawSpec,
    pub scan: ScanConfig,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Implication3Section {
    pub null: NullTransferSpec,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TheorySection {
    pub dims: Vec<usize>,
    pub theorem1_instances: usize,
    pub lemma1_instances: usize,
    pub theorem2_seeds: usize,
    pub balance_instances: usize,
}

impl Default for TheorySection {
    fn default() -> Self {
        Self {
            dims: vec![4, 8, 16],
            theorem1_instances: 1000,
            lemma1_instances: 200,
            theorem2_seeds: 100,
            balance_instances: 1000,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct IoSection {
    /// ACTV1 file of positive representations.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub positives: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub negatives: Option<String>,
    /// Steering-vector JSON record to decompose.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub vector: Option<String>,
    pub model_tag: String,
}

impl Default for IoSection {
    fn default() -> Self {
        Self {
            positives: None,
            negatives: None,
            vector: None,
            model_tag: "synthetic".into(),
        }
    }
}

/// Every section must be present; fields inside a section fall back to
/// their defaults.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub scenario: ScenarioConfig,
    pub probe: ProbeSettings,
    pub steering: SteeringSection,
    pub implication1: Implication1Section,
    pub implication2: Implication2Section,
    pub implication3: Implication3Section,
    pub theory: TheorySection,
    pub io: IoSection,
}

fn schema_err(msg: impl Into<String>) -> CrhError {
    CrhError::Schema(msg.into())
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: Self = toml::from_str(text).map_err(|e| schema_err(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: Self = serde_json::from_str(text).map_err(|e| schema_err(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// Format chosen by extension: `.toml` or `.json`.
    pub fn load(path: &Path) -> Result<Self> {
        let parse = match path.extension().and_then(|e| e.to_str()) {
            Some("toml") => Self::from_toml,
            Some("json") => Self::from_json,
            other => {
                return Err(schema_err(format!(
                    "config extension must be .toml or .json, got {:?}",
                    other.unwrap_or("")
                )))
            }
        };
        parse(&std::fs::read_to_string(path)?)
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| schema_err(e.to_string()))
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.scenario.seed = seed;
        self
    }

    pub fn seed(&self) -> u64 {
        self.scenario.seed
    }

    /// Compact JSON in declaration order; the basis of [`Self::hash`].
    pub fn canonical_json(&self) -> String {
        serde_json::to_string(self).expect("config serializes")
    }

    pub fn hash(&self) -> String {
        hash_text(&self.canonical_json())
    }

    /// Range checks the schema expresses as bounds.
    pub fn validate(&self) -> Result<()> {
        let s = &self.scenario;
        let check = |ok: bool, msg: &str| if ok { Ok(()) } else { Err(schema_err(msg.to_string())) };
        check(s.d >= 2, "scenario.d must be >= 2")?;
        check(s.n >= 1, "scenario.n must be >= 1")?;
        check(s.target < s.n, "scenario.target must be < scenario.n")?;
        check(
            (0.0..1.0).contains(&s.coherence),
            "scenario.coherence must lie in [0, 1)",
        )?;
        check(s.mu >= 0.0, "scenario.mu must be >= 0")?;
        check(s.tau_c > 0.0 && s.tau_x > 0.0, "scenario thresholds must be > 0")?;
        check(s.origin_scale >= 0.0, "scenario.origin_scale must be >= 0")?;
        if let AlphaSpec::Random { spread, .. } = s.alpha {
            check(spread >= 0.0, "scenario.alpha.spread must be >= 0")?;
        }
        self.probe.validate().map_err(|e| schema_err(format!("probe: {e}")))?;
        let st = &self.steering;
        check(!st.methods.is_empty(), "steering.methods must be nonempty")?;
        check(st.pairs >= 2, "steering.pairs must be >= 2")?;
        check(st.noise >= 0.0, "steering.noise must be >= 0")?;
        let i1 = &self.implication1;
        check(
            i1.rho_steps >= 2 && i1.lambda_steps >= 2,
            "implication1 steps must be >= 2",
        )?;
        check(
            i1.lambda_max.is_none_or(|l| l > 0.0),
            "implication1.lambda_max must be > 0",
        )?;
        check(i1.lambda_max_scale > 0.0, "implication1.lambda_max_scale must be > 0")?;
        check(
            (0.0..=1.0).contains(&i1.onset_level),
            "implication1.onset_level must lie in [0, 1]",
        )?;
        check(i1.setup.samples >= 1, "implication1.setup.samples must be >= 1")?;
        let i2 = &self.implication2;
        check(i2.generator.samples >= 3, "implication2.generator.samples must be >= 3")?;
        check(i2.scan.m_resolution >= 1, "implication2.scan.m_resolution must be >= 1")?;
        check(
            !i2.scan.k_grid.is_empty() && i2.scan.k_grid.iter().all(|k| *k > 0.0),
            "implication2.scan.k_grid must be positive",
        )?;
        let i3 = &self.implication3.null;
        check(
            i3.concepts >= 1 && i3.per_concept >= 2 && i3.d >= 2,
            "implication3.null sizes too small",
        )?;
        check(self.theory.dims.iter().all(|d| *d >= 3), "theory.dims must be >= 3")?;
        Ok(())
    }
}

pub fn hash_text(text: &str) -> String {
    hex::encode(Sha256::digest(text.as_bytes()))
}
