use crate::feasibility::fea_m;
use crate::geometry::{Point2, Pose2D};
use crate::grounding::{random_configuration, GoalConfiguration};
use crate::logic::RelationSet;
use crate::planning::{
    enumerate_task_plans, evaluate_plan, grop, materialize, GropParams, PlanningContext, PlanningError, TaskAction,
    TaskMotionPlan,
};
use crate::rng::Rng;
use crate::world::{ObjectSpec, Side, SymbolicLocation};
use rand::Rng as _;

/// Cells of `band` whose center the robot can occupy and reach.
pub fn free_cells(ctx: &PlanningContext, band: &SymbolicLocation) -> Vec<usize> {
    (0..band.cell_count())
        .filter(|&i| {
            let (c, r) = band.unflat(i);
            let p = band.cell_center(c, r);
            ctx.scene.robot_free(p) && ctx.nav.is_reachable(p)
        })
        .collect()
}

/// Uniform side, then a uniform free cell of that side's band (any cell when
/// none is free). Faces `y`.
pub fn uniform_standing_pose(ctx: &PlanningContext, y: Point2, rng: &mut Rng) -> (Side, Pose2D) {
    let side = Side::ALL[rng.gen_range(0..4)];
    let band = ctx.band(side);
    let free = free_cells(ctx, band);
    let flat = if free.is_empty() { rng.gen_range(0..band.cell_count()) } else { free[rng.gen_range(0..free.len())] };
    let (c, r) = band.unflat(flat);
    (side, Pose2D::facing(band.cell_center(c, r), y))
}

/// First stacking-consistent order with a uniformly drawn standing pose per
/// unload. Pair feasibility is the heatmap value at the drawn pose.
pub fn plan_with_uniform_standing(
    ctx: &PlanningContext,
    config: &GoalConfiguration,
    params: &GropParams,
    rng: &mut Rng,
) -> Result<TaskMotionPlan, PlanningError> {
    let first = enumerate_task_plans(config, &ctx.scene, &[Side::South], 1)?.remove(0);
    let mut sides = Vec::new();
    let mut drawn = Vec::new();
    for o in &first.order {
        let (s, pose) = uniform_standing_pose(ctx, config.world(o), rng);
        sides.push(s);
        drawn.push(pose);
    }
    let tp = crate::planning::TaskPlan::build(&ctx.scene, &config.table_id, &first.order, &sides)?;
    let (mut poses, mut unloads, mut feas) = (Vec::new(), Vec::new(), Vec::new());
    let mut k = 0;
    for (_, manip) in tp.pairs() {
        match manip {
            TaskAction::Load { object, .. } => {
                poses.push(ctx.pickup_for(object)?);
                unloads.push(None);
                feas.push(1.0);
            }
            TaskAction::Unload { object, .. } => {
                let y = config.world(object);
                let h = ctx.heatmap(y, sides[k]);
                poses.push(drawn[k]);
                unloads.push(Some(y));
                feas.push(fea_m(&h, drawn[k].position()).unwrap_or(0.0));
                k += 1;
            }
            TaskAction::Navigate { .. } => unreachable!("pairs end in manipulation"),
        }
    }
    let mut plan = evaluate_plan(ctx, 0, &tp, &poses, &unloads, &feas, &params.utility)
        .map_err(|e| PlanningError::MotionInfeasible(vec![e]))?;
    materialize(ctx, &mut plan)?;
    Ok(plan)
}

/// Random collision-free arrangement and random standing poses.
pub fn baseline_tpra(
    ctx: &PlanningContext,
    objects: &[String],
    relations: &RelationSet,
    specs: &[ObjectSpec],
    alignment_tol: f64,
    params: &GropParams,
    rng: &mut Rng,
) -> Result<(GoalConfiguration, TaskMotionPlan), PlanningError> {
    let config = random_configuration(objects, relations, ctx.scene.target(), specs, alignment_tol, rng)
        .map_err(|e| PlanningError::Params(e.to_string()))?;
    let plan = plan_with_uniform_standing(ctx, &config, params, rng)?;
    Ok((config, plan))
}

/// Language-model arrangement with uniformly sampled standing poses.
pub fn baseline_latp(
    ctx: &PlanningContext,
    config: &GoalConfiguration,
    params: &GropParams,
    rng: &mut Rng,
) -> Result<TaskMotionPlan, PlanningError> {
    plan_with_uniform_standing(ctx, config, params, rng)
}

/// Random collision-free arrangement with full standing-pose optimization.
#[allow(clippy::too_many_arguments)]
pub fn baseline_grop_only(
    ctx: &PlanningContext,
    objects: &[String],
    relations: &RelationSet,
    specs: &[ObjectSpec],
    alignment_tol: f64,
    params: &GropParams,
    rng: &mut Rng,
    seed: u64,
) -> Result<(GoalConfiguration, TaskMotionPlan), PlanningError> {
    let config = random_configuration(objects, relations, ctx.scene.target(), specs, alignment_tol, rng)
        .map_err(|e| PlanningError::Params(e.to_string()))?;
    let plan = grop(ctx, &config, params, seed)?;
    Ok((config, plan))
}
