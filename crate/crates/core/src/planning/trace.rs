use super::grop::{GropParams, TaskMotionPlan};
use crate::feasibility::FeasibilityParams;
use crate::grounding::GoalConfiguration;
use serde::{Deserialize, Serialize};
use std::path::Path;

/// Self-contained record of a planning result, enough to replay execution.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PlanTrace {
    pub method: String,
    pub scene_hash: String,
    #[serde(with = "crate::rng::wide_seed")]
    pub seed: u64,
    pub config_index: usize,
    pub grop: GropParams,
    pub feasibility: FeasibilityParams,
    pub config: GoalConfiguration,
    pub plan: TaskMotionPlan,
}

impl PlanTrace {
    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).expect("trace serializes")
    }

    pub fn from_toml_str(s: &str) -> Result<Self, String> {
        toml::from_str(s).map_err(|e| e.to_string())
    }

    pub fn save(&self, path: &Path) -> std::io::Result<()> {
        std::fs::write(path, self.to_toml_string())
    }

    pub fn load(path: &Path) -> Result<Self, String> {
        let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
        Self::from_toml_str(&text)
    }
}
