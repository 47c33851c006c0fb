use serde::{Deserialize, Serialize};

use crate::error::{CliError, Result};
use crate::suites::{
    commutators::CommutatorsConfig, identities::IdentitiesConfig, persistence::PersistenceConfig,
    solve::SolveConfig, weights::WeightsConfig,
};

pub const DEFAULT_SEED: u64 = 7;

/// Whole configuration file; every section is optional and echoed in full.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Config {
    pub seed: u64,
    pub identities: IdentitiesConfig,
    pub commutators: CommutatorsConfig,
    pub weights: WeightsConfig,
    pub solve: SolveConfig,
    pub persistence: PersistenceConfig,
}

impl Default for Config {
    fn default() -> Self {
        Config {
            seed: DEFAULT_SEED,
            identities: IdentitiesConfig::default(),
            commutators: CommutatorsConfig::default(),
            weights: WeightsConfig::default(),
            solve: SolveConfig::default(),
            persistence: PersistenceConfig::default(),
        }
    }
}

impl Config {
    /// Parses TOML; errors carry line and column.
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))
    }

    pub fn load(path: &std::path::Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        Self::from_toml(&text).map_err(|e| match e {
            CliError::Config(m) => CliError::Config(format!("{}: {m}", path.display())),
            other => other,
        })
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }
}
