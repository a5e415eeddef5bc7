//! Navigate-then-unload trials, empirical heatmaps and the feasibility
//! estimates planning consumes.

pub mod cache;
pub mod export;
pub mod heatmap;
pub mod trial;

pub use cache::{HeatmapCache, HeatmapKey};
pub use export::{heatmap_image, write_heatmap, write_overlay, HeatmapSidecar};
pub use heatmap::{fea_m, fea_t, generate_heatmap, generate_heatmap_records, smp, weighted_mean, Heatmap};
pub use trial::{run_trial, trial_outcome, TrialOutcome, TrialRecord};

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum FeasibilityError {
    #[error("point ({x:.3}, {y:.3}) is outside the heatmap region")]
    OutOfRegion { x: f64, y: f64 },
    #[error("{0}")]
    Params(String),
    #[error("heatmap io: {0}")]
    Io(String),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct FeasibilityParams {
    /// Trials per heatmap cell.
    pub trials_per_cell: u32,
    /// Std of the arrival position error per axis, meters.
    pub nav_noise_sigma_xy: f64,
    /// Std of the arrival heading error, radians.
    pub nav_noise_sigma_theta: f64,
    pub reach_radius: f64,
    /// Standing-pose samples per action pair for the task-level estimate.
    pub n_smp: usize,
}

impl Default for FeasibilityParams {
    fn default() -> Self {
        Self {
            trials_per_cell: 5,
            nav_noise_sigma_xy: 0.01,
            nav_noise_sigma_theta: 0.05,
            reach_radius: 1.0,
            n_smp: 25,
        }
    }
}

impl FeasibilityParams {
    pub fn validate(&self) -> Result<(), FeasibilityError> {
        let ok = self.trials_per_cell >= 1
            && self.nav_noise_sigma_xy > 0.0
            && self.nav_noise_sigma_theta > 0.0
            && self.reach_radius > 0.0
            && self.n_smp >= 1;
        if ok {
            Ok(())
        } else {
            Err(FeasibilityError::Params("feasibility parameters must be positive".into()))
        }
    }
}
