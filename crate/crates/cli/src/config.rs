//! Run configuration: one JSON file describing a reproducible pipeline.

use std::fs;
use std::path::{Path, PathBuf};

use ivie_core::model::Scenario;
use ivie_core::solver::{GridSpec, LambdaRule, Penalty};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ScenarioSource {
    /// Path to a scenario JSON file, relative to the config file.
    Path(PathBuf),
    Inline(Box<Scenario>),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct SolverSpec {
    #[serde(default)]
    pub penalty: Penalty,
    #[serde(default)]
    pub lambda: LambdaRule,
}

/// Settings of `validate`; every field has a default.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ValidationSpec {
    pub density_n: usize,
    pub condition5_n: usize,
    pub condition5_x: Vec<f64>,
    pub rate_n: usize,
    pub sigma_ladder: Vec<f64>,
    pub rate_z: f64,
    pub phi_x: f64,
    pub central_fraction: f64,
    /// Recovery error reported against this threshold; informational.
    pub max_rel_l2: f64,
}

impl Default for ValidationSpec {
    fn default() -> Self {
        ValidationSpec {
            density_n: 100_000,
            condition5_n: 100_000,
            condition5_x: vec![-2.0, -1.0, 0.0, 1.0, 2.0],
            rate_n: 1_000_000,
            sigma_ladder: vec![0.4, 0.2, 0.1, 0.05],
            rate_z: 1.0,
            phi_x: 0.0,
            central_fraction: 0.8,
            max_rel_l2: 0.10,
        }
    }
}

fn default_output_dir() -> PathBuf {
    PathBuf::from("out")
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub scenario: ScenarioSource,
    pub n_per_level: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub grid: GridSpec,
    #[serde(default)]
    pub solver: SolverSpec,
    #[serde(default = "default_output_dir")]
    pub output_dir: PathBuf,
    #[serde(default)]
    pub validation: ValidationSpec,
}

/// A parsed config with its scenario inlined and its identifying hash.
#[derive(Debug, Clone)]
pub struct LoadedConfig {
    pub config: RunConfig,
    pub scenario: Scenario,
    /// Hex SHA-256 of the canonical JSON of the resolved config, excluding
    /// the output directory.
    pub hash: String,
}

impl LoadedConfig {
    pub fn load(path: &Path, seed_override: Option<u64>) -> CliResult<Self> {
        let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        let config: RunConfig = serde_json::from_str(&text).map_err(|e| CliError::Config {
            path: path.to_path_buf(),
            detail: e.to_string(),
        })?;
        let base = path.parent().unwrap_or(Path::new("."));
        Self::resolve(config, base, seed_override).map_err(|e| match e {
            CliError::Core(inner) => CliError::Config {
                path: path.to_path_buf(),
                detail: inner.to_string(),
            },
            other => other,
        })
    }

    pub fn resolve(
        mut config: RunConfig,
        base: &Path,
        seed_override: Option<u64>,
    ) -> CliResult<Self> {
        let scenario = match &config.scenario {
            ScenarioSource::Inline(s) => (**s).clone(),
            ScenarioSource::Path(p) => {
                let full = base.join(p);
                let text = fs::read_to_string(&full).map_err(|e| CliError::io(&full, e))?;
                serde_json::from_str(&text).map_err(|e| CliError::Config {
                    path: full.clone(),
                    detail: e.to_string(),
                })?
            }
        };
        scenario.validate()?;
        if config.n_per_level == 0 {
            return Err(ivie_core::Error::Validation {
                what: "config",
                detail: "n_per_level must be positive".into(),
            }
            .into());
        }
        if let Some(seed) = seed_override {
            config.seed = seed;
        }
        config.scenario = ScenarioSource::Inline(Box::new(scenario.clone()));
        let mut canonical = config.clone();
        canonical.output_dir = PathBuf::new();
        let bytes = serde_json::to_vec(&canonical).expect("config serializes");
        let hash = format!("{:x}", Sha256::digest(&bytes));
        Ok(LoadedConfig {
            config,
            scenario,
            hash,
        })
    }
}
