//! Batch experiments: scenarios, the compared methods, execution and reports.

pub mod baselines;
pub mod config;
pub mod report;

pub use baselines::{
    baseline_grop_only, baseline_latp, baseline_tpra, free_cells, plan_with_uniform_standing, uniform_standing_pose,
};
pub use config::{BackendKind, ExperimentConfig, GoalGenOverrides, Method};
pub use report::{Aggregates, RunReport, TrialRow, TrialStatus};

use crate::exec::{execute, relation_satisfaction, verify_goal, FailureMode};
use crate::feasibility::{write_heatmap, write_overlay, HeatmapCache};
use crate::grounding::{build_nominal_layout, rank_configurations, sample_configurations, GoalConfiguration};
use crate::llm::{generate_distances, generate_symbolic_goal, DistanceSuggestion, GoalGenParams, LlmBackend, SymbolicGoal};
use crate::planning::{select_best_over_configurations, PlanTrace, PlanningContext, TaskMotionPlan};
use crate::rng;
use crate::scenarios::{dining_scene, make_scenarios, EnvKind};
use crate::tasks::task_by_id;
use crate::world::{load_scene, SceneState};
use rayon::prelude::*;
use std::path::Path;
use std::sync::Arc;

#[derive(Debug, thiserror::Error)]
pub enum ExperimentError {
    #[error("config: {0}")]
    Config(String),
    #[error("goal generation: {0}")]
    Goal(#[from] crate::llm::GoalGenError),
    #[error("scene: {0}")]
    Scene(#[from] crate::world::SceneError),
    #[error("planning setup: {0}")]
    Planning(#[from] crate::planning::PlanningError),
    #[error("output: {0}")]
    Io(String),
}

/// Symbolic goal and per-relation distances from a backend.
pub fn goal_pipeline(
    objects: &[String],
    backend: &dyn LlmBackend,
    params: &GoalGenParams,
) -> Result<(SymbolicGoal, Vec<DistanceSuggestion>), crate::llm::GoalGenError> {
    let goal = generate_symbolic_goal(objects, backend, params)?;
    let distances = generate_distances(&goal, backend, params)?;
    Ok((goal, distances))
}

/// Scenes for each repetition. Fixed environments share one scene.
pub fn experiment_scenes(config: &ExperimentConfig) -> Result<Vec<SceneState>, ExperimentError> {
    let task = task_by_id(config.task).ok_or_else(|| ExperimentError::Config(format!("unknown task {}", config.task)))?;
    let base = match &config.scene {
        Some(p) => load_scene(p)?,
        None => dining_scene(&task.objects, config.seed),
    };
    let count = if config.environment == EnvKind::Random { config.repetitions } else { 1 };
    let mut r = rng::stream(config.seed, "scenarios", 0);
    let scenes = make_scenarios(config.environment, &base, count, &mut r);
    for s in &scenes {
        s.validate()?;
    }
    Ok(scenes)
}

/// Arrangement and plan chosen by one method for one repetition.
pub struct Planned {
    pub config_index: usize,
    pub config: GoalConfiguration,
    pub plan: TaskMotionPlan,
}

/// Runs the configured method once on `ctx` with the repetition seed.
pub fn plan_rep(
    cfg: &ExperimentConfig,
    ctx: &PlanningContext,
    goal: &SymbolicGoal,
    distances: &[DistanceSuggestion],
    seed: u64,
) -> Result<Planned, String> {
    let scene = &ctx.scene;
    let table = scene.target();
    let llm_configs = || -> Result<Vec<GoalConfiguration>, String> {
        let layout = build_nominal_layout(goal, distances).map_err(|e| e.to_string())?;
        sample_configurations(&layout, &goal.relations, table, &scene.objects, &cfg.sampler, rng::child_seed(seed, "grounding", 0))
            .map_err(|e| e.to_string())
    };
    let mut r = rng::stream(seed, "method", 0);
    let tol = cfg.sampler.alignment_tol;
    let plan_seed = rng::child_seed(seed, "plan", 0);
    match cfg.method {
        Method::LlmGrop => {
            let configs = llm_configs()?;
            let (k, plan) = select_best_over_configurations(ctx, &configs, &cfg.grop, plan_seed).map_err(|e| e.to_string())?;
            Ok(Planned { config_index: k, config: configs[k].clone(), plan })
        }
        Method::Latp => {
            let configs = llm_configs()?;
            let k = rank_configurations(&configs)[0];
            let plan = baseline_latp(ctx, &configs[k], &cfg.grop, &mut r).map_err(|e| e.to_string())?;
            Ok(Planned { config_index: k, config: configs[k].clone(), plan })
        }
        Method::Tpra => {
            let (config, plan) = baseline_tpra(ctx, &goal.objects, &goal.relations, &scene.objects, tol, &cfg.grop, &mut r)
                .map_err(|e| e.to_string())?;
            Ok(Planned { config_index: 0, config, plan })
        }
        Method::GropOnly => {
            let (config, plan) =
                baseline_grop_only(ctx, &goal.objects, &goal.relations, &scene.objects, tol, &cfg.grop, &mut r, rng::child_seed(plan_seed, "config", 0))
                    .map_err(|e| e.to_string())?;
            Ok(Planned { config_index: 0, config, plan })
        }
    }
}

fn io(e: impl std::fmt::Display) -> ExperimentError {
    ExperimentError::Io(e.to_string())
}

/// Runs every repetition and, when `out` is given, writes `report.json`,
/// `report.txt`, `runlog.jsonl`, the scenes, one plan trace per repetition
/// and heatmap images for the first repetition.
pub fn run_experiment(
    cfg: &ExperimentConfig,
    backend: &dyn LlmBackend,
    out: Option<&Path>,
) -> Result<RunReport, ExperimentError> {
    cfg.validate().map_err(ExperimentError::Config)?;
    let task = task_by_id(cfg.task).expect("validated task");
    let (goal, distances) = goal_pipeline(&task.objects, backend, &cfg.goal_params())?;
    let scenes = experiment_scenes(cfg)?;
    let cache = Arc::new(match &cfg.heatmap_cache_dir {
        Some(d) => HeatmapCache::with_dir(d),
        None => HeatmapCache::new(),
    });
    let contexts: Vec<PlanningContext> = scenes
        .iter()
        .map(|s| PlanningContext::new(s, cfg.feasibility.clone(), cache.clone()))
        .collect::<Result<_, _>>()?;
    let pool = rayon::ThreadPoolBuilder::new().num_threads(cfg.workers).build().map_err(io)?;
    let results: Vec<(TrialRow, Option<PlanTrace>)> = pool.install(|| {
        (0..cfg.repetitions)
            .into_par_iter()
            .map(|rep| {
                let seed = cfg.rep_seed(rep);
                let ctx = &contexts[rep % contexts.len()];
                let scene_file = format!("scene_{:03}.scene", rep % contexts.len());
                match plan_rep(cfg, ctx, &goal, &distances, seed) {
                    Ok(p) => {
                        let exec_seed = rng::child_seed(seed, "exec", 0);
                        let outcome = execute(ctx, &p.plan, &p.config, &cfg.grop.utility, exec_seed);
                        let sat = relation_satisfaction(&outcome, &p.config, cfg.sampler.alignment_tol);
                        let verified = verify_goal(&outcome, &p.config, &cfg.feasibility).ok();
                        let status = match outcome.failure_mode {
                            FailureMode::None => TrialStatus::Success,
                            FailureMode::Navigation => TrialStatus::Navigation,
                            FailureMode::Manipulation => TrialStatus::Manipulation,
                        };
                        let row = TrialRow {
                            rep,
                            seed,
                            scene: scene_file,
                            status,
                            config_index: p.config_index,
                            plan_index: p.plan.plan_index,
                            planned_feasibility: p.plan.feasibility,
                            planned_cost: p.plan.cost,
                            utility: p.plan.utility,
                            executed_cost: outcome.executed_cost,
                            relation_satisfaction: sat,
                            goal_verified: verified,
                            error: None,
                        };
                        let trace = PlanTrace {
                            method: cfg.method.to_string(),
                            scene_hash: ctx.scene_hash.clone(),
                            seed: exec_seed,
                            config_index: p.config_index,
                            grop: cfg.grop.clone(),
                            feasibility: cfg.feasibility.clone(),
                            config: p.config,
                            plan: p.plan,
                        };
                        (row, Some(trace))
                    }
                    Err(e) => (TrialRow::planning_failure(rep, seed, scene_file, e), None),
                }
            })
            .collect()
    });
    let rows: Vec<TrialRow> = results.iter().map(|(r, _)| r.clone()).collect();
    let report = RunReport::new(cfg, &goal, rows);
    if let Some(dir) = out {
        write_outputs(dir, cfg, &report, &scenes, &contexts, &results)?;
    }
    Ok(report)
}

fn write_outputs(
    dir: &Path,
    cfg: &ExperimentConfig,
    report: &RunReport,
    scenes: &[SceneState],
    contexts: &[PlanningContext],
    results: &[(TrialRow, Option<PlanTrace>)],
) -> Result<(), ExperimentError> {
    std::fs::create_dir_all(dir.join("traces")).map_err(io)?;
    std::fs::write(dir.join("report.json"), report.to_json()).map_err(io)?;
    std::fs::write(dir.join("report.txt"), report.to_table()).map_err(io)?;
    std::fs::write(dir.join("runlog.jsonl"), report.to_jsonl()).map_err(io)?;
    for (i, s) in scenes.iter().enumerate() {
        s.save(&dir.join(format!("scene_{i:03}.scene"))).map_err(io)?;
    }
    for (row, trace) in results {
        if let Some(t) = trace {
            t.save(&dir.join("traces").join(format!("rep_{:03}.plan.toml", row.rep))).map_err(io)?;
            t.config.save(&dir.join("traces").join(format!("rep_{:03}.goal", row.rep))).map_err(io)?;
        }
    }
    if cfg.export_heatmaps {
        if let Some((row, Some(t))) = results.first() {
            let ctx = &contexts[row.rep % contexts.len()];
            let hdir = dir.join("heatmaps");
            let mut maps = Vec::new();
            for (i, o) in t.plan.task_plan.order.iter().enumerate() {
                let side = t.plan.task_plan.sides[i];
                let h = ctx.heatmap(t.config.world(o), side);
                write_heatmap(&h, &cfg.feasibility, &hdir, &format!("{o}_{side}")).map_err(io)?;
                maps.push(h);
            }
            let refs: Vec<&crate::feasibility::Heatmap> = maps.iter().map(|h| h.as_ref()).collect();
            write_overlay(&ctx.scene, &refs, &hdir.join("overlay.ppm")).map_err(io)?;
        }
    }
    Ok(())
}
