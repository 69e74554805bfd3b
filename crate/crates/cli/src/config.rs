use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::CliError;

/// Every experiment parameter, as read from a config file or flags.
#[derive(Serialize, Deserialize, Clone, Debug, Default, PartialEq)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub q: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub e: Option<u32>,
    #[serde(rename = "M", skip_serializing_if = "Option::is_none")]
    pub m: Option<String>,
    #[serde(rename = "Q", skip_serializing_if = "Option::is_none")]
    pub q_mod: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub noise: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub delta: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mu: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub repetitions: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub budget: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub workers: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub d: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub trials: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub count: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub basis: Option<PathBuf>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub distinguisher: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub samples_per_query: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub hybrid: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timing: Option<bool>,
}

macro_rules! overlay {
    ($base:ident, $top:ident, $($f:ident),*) => {
        ExperimentConfig { $($f: $top.$f.or($base.$f)),* }
    };
}

impl ExperimentConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self, CliError> {
        toml::from_str(text).map_err(|e| CliError::Usage(format!("config: {e}")))
    }

    pub fn to_text(&self) -> String {
        toml::to_string(self).expect("flat config serializes")
    }

    /// Fields set in `top` win.
    pub fn overlay(self, top: ExperimentConfig) -> ExperimentConfig {
        let base = self;
        overlay!(
            base,
            top,
            q,
            p,
            e,
            m,
            q_mod,
            noise,
            delta,
            mu,
            repetitions,
            budget,
            workers,
            seed,
            out,
            d,
            trials,
            count,
            basis,
            distinguisher,
            samples_per_query,
            hybrid,
            timing
        )
    }
}
