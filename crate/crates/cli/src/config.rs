use std::path::Path;

use anyhow::{bail, Context};
use proxauth_authd::ServiceConfig;
use proxauth_core::ml::Hyperparams;
use proxauth_core::rfsim::SimConfig;
use proxauth_core::threat::AttackSpec;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EvalConfig {
    pub test_fraction: f64,
    pub folds: usize,
}

impl Default for EvalConfig {
    fn default() -> Self {
        EvalConfig { test_fraction: 0.2, folds: 5 }
    }
}

/// Everything a run can be configured with. Each table is optional.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FileConfig {
    pub sim: SimConfig,
    pub hyperparams: Hyperparams,
    pub evaluation: EvalConfig,
    /// Empty means the three default experiments.
    pub attacks: Vec<AttackSpec>,
    pub service: ServiceConfig,
}

impl FileConfig {
    pub fn from_toml_str(text: &str) -> anyhow::Result<FileConfig> {
        let c: FileConfig = toml::from_str(text)?;
        c.sim.validate()?;
        c.service.policy.validate()?;
        if !(c.evaluation.test_fraction > 0.0 && c.evaluation.test_fraction < 1.0) {
            bail!("evaluation.test_fraction must be in (0, 1)");
        }
        Ok(c)
    }

    pub fn load(path: Option<&Path>) -> anyhow::Result<FileConfig> {
        match path {
            None => Ok(FileConfig::default()),
            Some(p) => {
                let text = std::fs::read_to_string(p).with_context(|| format!("reading config {}", p.display()))?;
                FileConfig::from_toml_str(&text).with_context(|| format!("config {}", p.display()))
            }
        }
    }
}
