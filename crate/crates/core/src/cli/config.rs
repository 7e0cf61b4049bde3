//! Resolved run configuration. Every run writes it back as
//! `manifest.json`; replaying a manifest reproduces the run.

use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::engine::BridgeSpec;
use crate::error::{Error, Result};
use crate::intensity::{FamilyName, IntensityModel, ModelDescriptor};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum SamplerKind {
    Thinning,
    Constant,
    Rejection,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum CheckName {
    Convexity,
    Dominance,
    MeanBound,
    Duality,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum DirectionArg {
    Lower,
    Upper,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "kebab-case")]
pub enum CommandConfig {
    Characteristics { t_step: f64 },
    MeanCurve { t_step: f64 },
    Marginals { t_step: f64 },
    Sample { sampler: SamplerKind },
    Verify { checks: Vec<CheckName>, direction: DirectionArg, convexity_step: f64 },
    Lln { n_list: Vec<u64> },
}

impl CommandConfig {
    pub fn name(&self) -> &'static str {
        match self {
            CommandConfig::Characteristics { .. } => "characteristics",
            CommandConfig::MeanCurve { .. } => "mean-curve",
            CommandConfig::Marginals { .. } => "marginals",
            CommandConfig::Sample { .. } => "sample",
            CommandConfig::Verify { .. } => "verify",
            CommandConfig::Lln { .. } => "lln",
        }
    }
}

/// One intensity to run, with the characteristic value `lambda` it is
/// compared against (if any).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelEntry {
    pub label: String,
    pub lambda: Option<f64>,
    pub descriptor: ModelDescriptor,
}

impl ModelEntry {
    /// `ℓ(t, z) = e^{λt}`, whose characteristic is identically λ.
    pub fn constant(lambda: f64) -> Self {
        Self {
            label: format!("lambda_{lambda}"),
            lambda: Some(lambda),
            descriptor: ModelDescriptor {
                family: FamilyName::TimeExponential,
                params: json!({ "alpha": 1.0, "lambda": lambda }),
                state_floor: 0,
            },
        }
    }

    pub fn from_file(path: &Path, lambda: Option<f64>) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        let descriptor = ModelDescriptor::from_json(&text)?;
        descriptor.build()?;
        Ok(Self { label: "model".into(), lambda, descriptor })
    }

    pub fn build(&self) -> Result<IntensityModel<f64>> {
        self.descriptor.build()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    pub margin: f64,
    pub second_diff: f64,
    pub z: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub command: CommandConfig,
    pub models: Vec<ModelEntry>,
    pub x: u64,
    pub y: u64,
    pub s: f64,
    pub u: f64,
    pub h_step: f64,
    pub seed: u64,
    pub replicas: usize,
    pub tolerances: Tolerances,
    pub gnuplot: bool,
}

impl RunConfig {
    pub fn spec(&self) -> Result<BridgeSpec<f64>> {
        BridgeSpec::new(self.x, self.y, self.s, self.u)
    }

    pub fn validate(&self) -> Result<()> {
        self.spec()?;
        if self.models.is_empty() {
            return Err(Error::InvalidInput("no model to run".into()));
        }
        for m in &self.models {
            m.build()?;
        }
        let t_step = match self.command {
            CommandConfig::Characteristics { t_step }
            | CommandConfig::MeanCurve { t_step }
            | CommandConfig::Marginals { t_step } => Some(t_step),
            _ => None,
        };
        if let Some(t) = t_step {
            if !(t > 0.0 && t <= 1.0) {
                return Err(Error::InvalidInput(format!("t-step {t} outside (0, 1]")));
            }
        }
        if let CommandConfig::Lln { n_list } = &self.command {
            if n_list.is_empty() || n_list.contains(&0) {
                return Err(Error::InvalidInput("n-list needs positive entries".into()));
            }
        }
        Ok(())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes") + "\n"
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: Self = serde_json::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }
}
