use super::motion::{plan_motion, CostField, Trajectory};
use super::task::{enumerate_task_plans, TaskAction, TaskPlan};
use super::PlanningError;
use crate::feasibility::{fea_t, smp, FeasibilityParams, Heatmap, HeatmapCache, HeatmapKey};
use crate::geometry::{Point2, Pose2D};
use crate::grounding::GoalConfiguration;
use crate::rng;
use crate::world::{pickup_pose, symbolic_locations, NavGrid, SceneState, Side, SymbolicLocation};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::sync::Arc;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct UtilityParams {
    /// Success bonus in cost units.
    pub success_bonus: f64,
    /// Cost of each load or unload.
    pub manipulation_cost: f64,
}

impl Default for UtilityParams {
    fn default() -> Self {
        Self { success_bonus: 100.0, manipulation_cost: 0.5 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct GropParams {
    pub utility: UtilityParams,
    pub plan_cap: usize,
}

impl Default for GropParams {
    fn default() -> Self {
        Self { utility: UtilityParams::default(), plan_cap: 500 }
    }
}

impl GropParams {
    pub fn validate(&self) -> Result<(), PlanningError> {
        if self.utility.success_bonus > 0.0 && self.utility.manipulation_cost >= 0.0 && self.plan_cap > 0 {
            Ok(())
        } else {
            Err(PlanningError::Params("success bonus and plan cap must be positive".into()))
        }
    }
}

/// Robot target and estimates for one navigation/manipulation pair.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PairStep {
    pub pose: Pose2D,
    /// World unload point; absent for loads.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub unload: Option<Point2>,
    pub feasibility: f64,
    /// Length of the drive into `pose`.
    pub motion_cost: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TaskMotionPlan {
    /// Index in the enumeration the plan came from.
    pub plan_index: usize,
    pub task_plan: TaskPlan,
    pub steps: Vec<PairStep>,
    pub feasibility: f64,
    pub cost: f64,
    pub utility: f64,
    /// One drive per pair, chained from the robot's start pose.
    #[serde(default)]
    pub trajectories: Vec<Trajectory>,
}

/// Everything about one scene that planning reuses across plans,
/// configurations and trials.
pub struct PlanningContext {
    pub scene: SceneState,
    pub scene_hash: String,
    pub nav: NavGrid,
    pub bands: Vec<SymbolicLocation>,
    pub pickups: BTreeMap<String, Pose2D>,
    fields: BTreeMap<String, CostField>,
    pub feasibility: FeasibilityParams,
    pub cache: Arc<HeatmapCache>,
}

impl PlanningContext {
    pub fn new(scene: &SceneState, feasibility: FeasibilityParams, cache: Arc<HeatmapCache>) -> Result<Self, PlanningError> {
        feasibility.validate().map_err(|e| PlanningError::Params(e.to_string()))?;
        let nav = NavGrid::build(scene);
        let bands = symbolic_locations(scene, &scene.target_table).map_err(|e| PlanningError::Scene(e.to_string()))?;
        let mut pickups = BTreeMap::new();
        let mut fields = BTreeMap::new();
        for o in &scene.objects {
            if pickups.contains_key(&o.initial_location) {
                continue;
            }
            let pose = pickup_pose(scene, &nav, &o.initial_location).map_err(|e| PlanningError::Scene(e.to_string()))?;
            fields.insert(o.initial_location.clone(), CostField::new(&nav.grid, pose)?);
            pickups.insert(o.initial_location.clone(), pose);
        }
        Ok(Self {
            scene: scene.clone(),
            scene_hash: scene.content_hash(),
            nav,
            bands,
            pickups,
            fields,
            feasibility,
            cache,
        })
    }

    pub fn band(&self, side: Side) -> &SymbolicLocation {
        self.bands.iter().find(|b| b.side == side).expect("all four sides present")
    }

    /// Heatmap seed derived from the scene seed and the heatmap's identity so
    /// equal requests share one cache entry.
    pub fn heatmap_seed(&self, y: Point2, band: &SymbolicLocation) -> u64 {
        let key = HeatmapKey::new("", y, band, &self.feasibility, 0);
        rng::child_seed(self.scene.seed, &format!("heatmap:{}:{:?}", key.band, key.y_um), 0)
    }

    pub fn heatmap(&self, y: Point2, side: Side) -> Arc<Heatmap> {
        let band = self.band(side);
        let seed = self.heatmap_seed(y, band);
        self.cache.get_or_compute(&self.scene, &self.scene_hash, &self.nav, y, band, &self.feasibility, seed)
    }

    pub fn pickup_for(&self, object: &str) -> Result<Pose2D, PlanningError> {
        let o = self.scene.object(object).ok_or_else(|| PlanningError::UnknownObject(object.to_string()))?;
        Ok(self.pickups[&o.initial_location])
    }

    /// Drive cost between two poses, priced from a cached field when either
    /// end is a pickup pose.
    pub fn motion_cost(&self, a: Pose2D, b: Pose2D) -> Option<f64> {
        for f in self.fields.values() {
            if f.source.position() == a.position() {
                return f.cost_to(b.position());
            }
            if f.source.position() == b.position() {
                return f.cost_to(a.position());
            }
        }
        plan_motion(&self.nav.grid, a, b).ok().map(|t| t.cost)
    }

    pub fn start(&self) -> Pose2D {
        self.scene.robot.pose
    }
}

/// Prices a task plan whose per-pair poses and feasibility are fixed:
/// `F` is the mean pair feasibility, `C` the chained drive lengths plus
/// manipulation costs, `U = R F - C`.
pub fn evaluate_plan(
    ctx: &PlanningContext,
    plan_index: usize,
    task_plan: &TaskPlan,
    poses: &[Pose2D],
    unloads: &[Option<Point2>],
    feasibility: &[f64],
    params: &UtilityParams,
) -> Result<TaskMotionPlan, String> {
    let mut prev = ctx.start();
    let mut steps = Vec::with_capacity(poses.len());
    let mut cost = 0.0;
    for (i, pose) in poses.iter().enumerate() {
        let c = ctx
            .motion_cost(prev, *pose)
            .ok_or_else(|| format!("plan {plan_index} pair {i}: no path to ({:.2}, {:.2})", pose.x, pose.y))?;
        cost += c + params.manipulation_cost;
        steps.push(PairStep { pose: *pose, unload: unloads[i], feasibility: feasibility[i], motion_cost: c });
        prev = *pose;
    }
    let f = feasibility.iter().sum::<f64>() / feasibility.len().max(1) as f64;
    Ok(TaskMotionPlan {
        plan_index,
        task_plan: task_plan.clone(),
        steps,
        feasibility: f,
        cost,
        utility: params.success_bonus * f - cost,
        trajectories: Vec::new(),
    })
}

/// Chains grid motions through the plan's poses.
pub fn materialize(ctx: &PlanningContext, plan: &mut TaskMotionPlan) -> Result<(), PlanningError> {
    let mut prev = ctx.start();
    plan.trajectories.clear();
    for s in &plan.steps {
        plan.trajectories.push(plan_motion(&ctx.nav.grid, prev, s.pose)?);
        prev = s.pose;
    }
    Ok(())
}

/// Highest utility wins; ties go to the earlier entry.
fn argmax<T>(items: impl IntoIterator<Item = (f64, T)>) -> Option<T> {
    let mut best: Option<(f64, T)> = None;
    for (u, t) in items {
        if best.as_ref().map_or(true, |(b, _)| u > *b) {
            best = Some((u, t));
        }
    }
    best.map(|(_, t)| t)
}

/// One task-level feasibility estimate and one weighted standing-pose draw
/// per (object, side), shared by every plan that makes that unload.
pub fn unload_estimates(ctx: &PlanningContext, config: &GoalConfiguration, seed: u64) -> BTreeMap<(String, Side), (f64, Pose2D)> {
    let combos: Vec<(String, Side)> = config
        .positions
        .keys()
        .flat_map(|o| Side::ALL.iter().map(move |s| (o.clone(), *s)))
        .collect();
    combos
        .par_iter()
        .map(|(o, s)| {
            let h = ctx.heatmap(config.world(o), *s);
            let mut r = rng::stream(seed, &format!("fea_t:{o}:{s}"), 0);
            let f = fea_t(&h, ctx.band(*s), ctx.feasibility.n_smp, &mut r);
            let mut r = rng::stream(seed, &format!("smp:{o}:{s}"), 0);
            let x = smp(ctx.band(*s), &h, &mut r);
            ((o.clone(), *s), (f, x))
        })
        .collect()
}

/// Utility-maximal task-motion plan for one goal configuration.
///
/// Pickup pairs count as certain. For each unload pair the heatmap of its
/// side gives the task-level feasibility estimate and one weighted standing
/// pose sample; motion costs chain through those poses. Plans making the
/// same unload from the same side see the same sample.
pub fn grop(ctx: &PlanningContext, config: &GoalConfiguration, params: &GropParams, seed: u64) -> Result<TaskMotionPlan, PlanningError> {
    params.validate()?;
    let plans = enumerate_task_plans(config, &ctx.scene, &Side::ALL, params.plan_cap)?;
    let estimates = unload_estimates(ctx, config, seed);
    let evaluated: Vec<Result<TaskMotionPlan, String>> = plans
        .par_iter()
        .enumerate()
        .map(|(i, tp)| {
            let mut poses = Vec::new();
            let mut unloads = Vec::new();
            let mut feas = Vec::new();
            for (_, manip) in tp.pairs() {
                match manip {
                    TaskAction::Load { object, .. } => {
                        poses.push(ctx.pickup_for(object).map_err(|e| e.to_string())?);
                        unloads.push(None);
                        feas.push(1.0);
                    }
                    TaskAction::Unload { object, location } => {
                        let side = tp.sides[tp.order.iter().position(|o| o == object).expect("object in order")];
                        debug_assert!(location.ends_with(side.as_str()));
                        let (f, x) = estimates[&(object.clone(), side)];
                        poses.push(x);
                        unloads.push(Some(config.world(object)));
                        feas.push(f);
                    }
                    TaskAction::Navigate { .. } => unreachable!("pairs end in manipulation"),
                }
            }
            evaluate_plan(ctx, i, tp, &poses, &unloads, &feas, &params.utility)
        })
        .collect();
    let mut causes = Vec::new();
    let best = argmax(evaluated.into_iter().filter_map(|e| match e {
        Ok(p) => Some((p.utility, p)),
        Err(c) => {
            causes.push(c);
            None
        }
    }));
    let mut best = best.ok_or_else(|| {
        causes.truncate(5);
        PlanningError::MotionInfeasible(causes)
    })?;
    materialize(ctx, &mut best)?;
    Ok(best)
}

/// Runs `grop` on every configuration and keeps the best utility, ties to
/// the lower configuration index.
pub fn select_best_over_configurations(
    ctx: &PlanningContext,
    configs: &[GoalConfiguration],
    params: &GropParams,
    seed: u64,
) -> Result<(usize, TaskMotionPlan), PlanningError> {
    if configs.is_empty() {
        return Err(PlanningError::NoConfigurations);
    }
    let results: Vec<Result<TaskMotionPlan, PlanningError>> = configs
        .par_iter()
        .enumerate()
        .map(|(k, c)| grop(ctx, c, params, rng::child_seed(seed, "config", k as u64)))
        .collect();
    let mut last_err = None;
    let best = argmax(results.into_iter().enumerate().filter_map(|(k, r)| match r {
        Ok(p) => Some((p.utility, (k, p))),
        Err(e) => {
            last_err = Some(e);
            None
        }
    }));
    best.ok_or_else(|| last_err.unwrap_or(PlanningError::NoConfigurations))
}
