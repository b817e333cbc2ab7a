//! JSON run configuration. Every section is optional; command-line flags
//! override whatever the file sets.

use std::collections::BTreeMap;
use std::path::Path;

use anyhow::Context;
use serde::{Deserialize, Serialize};
use sodkit::assign::{AssignConfig, AssignerKind, MclaWeights, Strategy};
use sodkit::freq::{FdConfig, HfpConfig};
use sodkit::priors::LevelSpec;
use sodkit::sim::{simulation_strategy, SimConfig};

/// Which threshold set an assigner starts from before per-assigner
/// overrides apply.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Protocol {
    /// Simulation study thresholds without low-quality matching.
    #[default]
    Study,
    /// The detectors' own assigner settings, low-quality matching on.
    Canonical,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub sim: SimConfig,
    pub mcla: MclaWeights,
    pub hfp: HfpConfig,
    pub fd: FdConfig,
    pub protocol: Protocol,
    /// Per-assigner threshold overrides, keyed by assigner name.
    pub assign: BTreeMap<AssignerKind, AssignConfig>,
    /// Custom pyramid levels for dataset statistics; the assigners' native
    /// layouts are used when absent.
    pub pyramid: Option<Vec<LevelSpec>>,
}

impl RunConfig {
    pub fn load(path: Option<&Path>) -> anyhow::Result<Self> {
        let Some(path) = path else {
            return Ok(RunConfig::default());
        };
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("reading config {}", path.display()))?;
        serde_json::from_str(&text).with_context(|| format!("parsing config {}", path.display()))
    }

    pub fn strategy(&self, kind: AssignerKind) -> Strategy {
        let mut s = match self.protocol {
            Protocol::Study => simulation_strategy(kind),
            Protocol::Canonical => Strategy::new(kind),
        };
        if let Some(cfg) = self.assign.get(&kind) {
            s.config = *cfg;
        }
        s.weights = self.mcla;
        s
    }
}
