use std::path::Path;
use std::time::{Duration, SystemTime, UNIX_EPOCH};

use anyhow::{Context, Result};
use fewrel::config::ExperimentConfig;
use serde::{Deserialize, Serialize};

/// Everything needed to rerun an experiment.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunManifest {
    pub subcommand: String,
    pub version: String,
    /// Canonical config text; `surject --from-manifest` parses this.
    pub config_text: String,
    pub config: serde_json::Value,
    pub seed: u64,
    pub started_unix: u64,
    pub duration_secs: f64,
}

impl RunManifest {
    pub fn new(
        subcommand: &str,
        cfg: &ExperimentConfig,
        started: SystemTime,
        elapsed: Duration,
    ) -> Self {
        RunManifest {
            subcommand: subcommand.to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            config_text: cfg.to_text(),
            config: serde_json::to_value(cfg).expect("config serializes"),
            seed: cfg.seed,
            started_unix: started
                .duration_since(UNIX_EPOCH)
                .map_or(0, |d| d.as_secs()),
            duration_secs: elapsed.as_secs_f64(),
        }
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text =
            std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        serde_json::from_str(&text).with_context(|| format!("parsing manifest {}", path.display()))
    }

    pub fn config(&self) -> Result<ExperimentConfig> {
        Ok(ExperimentConfig::parse(&self.config_text)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("manifest serializes")
    }
}
