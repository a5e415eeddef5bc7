use super::FeasibilityParams;
use crate::geometry::{Point2, Pose2D};
use crate::rng::Rng;
use crate::world::{NavGrid, SceneState};
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

/// One `(y, x): r` data point.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub unload: Point2,
    /// `(col, row)` in the band.
    pub stand_cell: (usize, usize),
    pub success: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TrialOutcome {
    Success,
    Navigation,
    Manipulation,
}

impl TrialOutcome {
    pub fn is_success(&self) -> bool {
        *self == TrialOutcome::Success
    }
}

/// Perturbed arrival pose for a commanded standing pose. Always consumes
/// three normal draws so streams stay aligned across outcomes.
pub fn perturb(x: Pose2D, params: &FeasibilityParams, rng: &mut Rng) -> Pose2D {
    let nxy = Normal::new(0.0, params.nav_noise_sigma_xy).expect("positive sigma");
    let nth = Normal::new(0.0, params.nav_noise_sigma_theta).expect("positive sigma");
    let dx = nxy.sample(rng);
    let dy = nxy.sample(rng);
    let dth = nth.sample(rng);
    Pose2D::new(x.x + dx, x.y + dy, x.theta + dth)
}

/// Unload from `at` onto `y` on `table_id`: within reach and the straight
/// segment crosses no box except that table.
pub fn can_unload(scene: &SceneState, at: Point2, y: Point2, table_id: &str, params: &FeasibilityParams) -> bool {
    at.distance(&y) <= params.reach_radius
        && scene
            .boxes()
            .filter(|b| b.id != table_id)
            .all(|b| !b.rect().segment_intersects(at, y))
}

/// Navigate to `x`, then unload at `y`.
pub fn trial_outcome(
    scene: &SceneState,
    nav: &NavGrid,
    x: Pose2D,
    y: Point2,
    table_id: &str,
    params: &FeasibilityParams,
    rng: &mut Rng,
) -> (TrialOutcome, Pose2D) {
    let arrived = perturb(x, params, rng);
    let goal = x.position();
    if !scene.robot_free(goal) || !nav.is_reachable(goal) || !scene.robot_free(arrived.position()) {
        return (TrialOutcome::Navigation, arrived);
    }
    if !can_unload(scene, arrived.position(), y, table_id, params) {
        return (TrialOutcome::Manipulation, arrived);
    }
    (TrialOutcome::Success, arrived)
}

pub fn run_trial(
    scene: &SceneState,
    nav: &NavGrid,
    x: Pose2D,
    y: Point2,
    table_id: &str,
    params: &FeasibilityParams,
    rng: &mut Rng,
) -> bool {
    trial_outcome(scene, nav, x, y, table_id, params, rng).0.is_success()
}
