//! Stochastic execution of task-motion plans.

use crate::feasibility::trial::{trial_outcome, TrialOutcome};
use crate::feasibility::FeasibilityParams;
use crate::geometry::Point2;
use crate::grounding::GoalConfiguration;
use crate::logic::relation_satisfied;
use crate::planning::{PlanningContext, TaskAction, TaskMotionPlan, UtilityParams};
use crate::rng;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FailureMode {
    None,
    Navigation,
    Manipulation,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExecutionOutcome {
    pub success: bool,
    pub failure_mode: FailureMode,
    /// Pair index of the first failure.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub failed_pair: Option<usize>,
    /// Final table-frame positions of the objects placed on the target table.
    pub final_positions: BTreeMap<String, Point2>,
    pub executed_cost: f64,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ExecError {
    #[error("goal verification needs a successful outcome")]
    NotSuccessful,
}

/// Drives to each pair's pose and performs its manipulation. Pickups are
/// certain; every unload arrival is perturbed and checked exactly as a
/// feasibility trial. Stops at the first failure; cost accrues up to and
/// including the failed pair.
pub fn execute(
    ctx: &PlanningContext,
    plan: &TaskMotionPlan,
    config: &GoalConfiguration,
    utility: &UtilityParams,
    seed: u64,
) -> ExecutionOutcome {
    execute_with(ctx, plan, config, &ctx.feasibility, utility, seed)
}

pub fn execute_with(
    ctx: &PlanningContext,
    plan: &TaskMotionPlan,
    config: &GoalConfiguration,
    params: &FeasibilityParams,
    utility: &UtilityParams,
    seed: u64,
) -> ExecutionOutcome {
    let mut rng = rng::stream(seed, "execute", 0);
    let mut final_positions = BTreeMap::new();
    let mut cost = 0.0;
    for (i, ((_, manip), step)) in plan.task_plan.pairs().zip(&plan.steps).enumerate() {
        cost += step.motion_cost + utility.manipulation_cost;
        if let TaskAction::Unload { object, .. } = manip {
            let y = step.unload.unwrap_or_else(|| config.world(object));
            let (out, _) = trial_outcome(&ctx.scene, &ctx.nav, step.pose, y, &config.table_id, params, &mut rng);
            let mode = match out {
                TrialOutcome::Success => None,
                TrialOutcome::Navigation => Some(FailureMode::Navigation),
                TrialOutcome::Manipulation => Some(FailureMode::Manipulation),
            };
            if let Some(mode) = mode {
                if mode == FailureMode::Navigation {
                    cost -= utility.manipulation_cost;
                }
                return ExecutionOutcome {
                    success: false,
                    failure_mode: mode,
                    failed_pair: Some(i),
                    final_positions,
                    executed_cost: cost,
                    seed,
                };
            }
            final_positions.insert(object.clone(), config.positions[object]);
        }
    }
    ExecutionOutcome {
        success: true,
        failure_mode: FailureMode::None,
        failed_pair: None,
        final_positions,
        executed_cost: cost,
        seed,
    }
}

/// Fraction of the configuration's relations that hold over the final
/// positions; relations touching an unplaced object count as unmet.
pub fn relation_satisfaction(outcome: &ExecutionOutcome, config: &GoalConfiguration, tol: f64) -> f64 {
    let n = config.relations.len();
    if n == 0 {
        return 1.0;
    }
    let met = config
        .relations
        .iter()
        .filter(|a| relation_satisfied(a, &outcome.final_positions, &config.layers, tol).unwrap_or(false))
        .count();
    met as f64 / n as f64
}

/// Every relation holds over the final positions within the alignment
/// tolerance plus three arrival standard deviations.
pub fn verify_goal(
    outcome: &ExecutionOutcome,
    config: &GoalConfiguration,
    params: &FeasibilityParams,
) -> Result<bool, ExecError> {
    if !outcome.success {
        return Err(ExecError::NotSuccessful);
    }
    let tol = config.alignment_tol + 3.0 * params.nav_noise_sigma_xy;
    Ok(relation_satisfaction(outcome, config, tol) == 1.0)
}
