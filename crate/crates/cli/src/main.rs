use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;
use tabletamp::experiment::{
    experiment_scenes, goal_pipeline, plan_rep, run_experiment, BackendKind, ExperimentConfig, Method,
};
use tabletamp::feasibility::{weighted_mean, write_heatmap, write_overlay, Heatmap, HeatmapCache};
use tabletamp::geometry::Point2;
use tabletamp::grounding::GoalConfiguration;
use tabletamp::llm::{HttpBackend, HttpConfig, LlmBackend, ScriptedMock};
use tabletamp::planning::{polyline_length, simulate, supports, PlanTrace, PlanningContext};
use tabletamp::rng;
use tabletamp::scenarios::{dining_scene, make_scenarios, EnvKind};
use tabletamp::tasks::task_by_id;
use tabletamp::world::{load_scene, SceneState, Side};

#[derive(Parser)]
#[command(name = "tabletamp", version, about = "Tabletop rearrangement planning and experiments")]
struct Cli {
    /// Run seed; overrides the config file.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Experiment config file.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Language-model backend; overrides the config file.
    #[arg(long, global = true)]
    backend: Option<BackendKind>,
    /// Output directory.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Plan one task on one scene and write the plan trace.
    Plan(Setup),
    /// Feasibility heatmaps around the target table for one unload point.
    Heatmap(HeatmapArgs),
    /// Run an experiment and write its report.
    Run(Setup),
    /// Generate scene files.
    Scenarios(ScenarioArgs),
    /// Re-check scene, goal, plan trace and experiment files.
    Validate(ValidateArgs),
}

/// Overrides applied on top of the config file.
#[derive(Args, Clone, Default)]
struct Setup {
    /// Task id, 1 to 9.
    #[arg(long)]
    task: Option<u32>,
    /// easy, chair_top, chair_bottom or random.
    #[arg(long)]
    env: Option<EnvKind>,
    /// llm_grop, tpra, latp or grop_only.
    #[arg(long)]
    method: Option<Method>,
    /// Scene file to use instead of the built-in dining scene.
    #[arg(long)]
    scene: Option<PathBuf>,
    /// Directory of mock scripts.
    #[arg(long)]
    mock_dir: Option<PathBuf>,
    #[arg(long)]
    repetitions: Option<usize>,
    /// Worker threads, 0 for one per core.
    #[arg(long)]
    workers: Option<usize>,
}

#[derive(Args)]
struct HeatmapArgs {
    #[command(flatten)]
    setup: Setup,
    /// Unload point x in world coordinates; defaults to the table center.
    #[arg(long, allow_hyphen_values = true)]
    x: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    y: Option<f64>,
    /// One side only; all four by default.
    #[arg(long)]
    side: Option<Side>,
}

#[derive(Args)]
struct ScenarioArgs {
    #[command(flatten)]
    setup: Setup,
    #[arg(long, default_value_t = 10)]
    count: usize,
}

#[derive(Args)]
struct ValidateArgs {
    /// Files ending in .scene, .goal, .plan.toml or .toml (experiment config).
    #[arg(required = true)]
    files: Vec<PathBuf>,
    /// Scene for replaying plan traces against.
    #[arg(long)]
    scene: Option<PathBuf>,
}

fn experiment_config(cli: &Cli, s: &Setup) -> Result<ExperimentConfig> {
    let mut cfg = match &cli.config {
        Some(p) => ExperimentConfig::load(p).map_err(anyhow::Error::msg)?,
        None => ExperimentConfig::new(s.task.unwrap_or(1), EnvKind::Easy, Method::LlmGrop, 20, 0),
    };
    if let Some(t) = s.task {
        cfg.task = t;
    }
    if let Some(e) = s.env {
        cfg.environment = e;
    }
    if let Some(m) = s.method {
        cfg.method = m;
    }
    if let Some(p) = &s.scene {
        cfg.scene = Some(p.clone());
    }
    if let Some(p) = &s.mock_dir {
        cfg.mock_dir = p.clone();
    }
    if let Some(n) = s.repetitions {
        cfg.repetitions = n;
        if cfg.seeds.len() != n {
            cfg.seeds.clear();
        }
    }
    if let Some(w) = s.workers {
        cfg.workers = w;
    }
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
        cfg.seeds.clear();
    }
    if let Some(b) = cli.backend {
        cfg.backend = b;
    }
    cfg.validate().map_err(anyhow::Error::msg).context("invalid experiment config")?;
    Ok(cfg)
}

fn backend(cfg: &ExperimentConfig) -> Result<Box<dyn LlmBackend>> {
    Ok(match cfg.backend {
        BackendKind::Mock => Box::new(
            ScriptedMock::from_dir(&cfg.mock_dir).with_context(|| format!("loading mock scripts from {}", cfg.mock_dir.display()))?,
        ),
        BackendKind::Http => Box::new(HttpBackend::new(HttpConfig::from_env()?)?),
    })
}

fn out_dir(cli: &Cli, default: &str) -> Result<PathBuf> {
    let dir = cli.out.clone().unwrap_or_else(|| PathBuf::from(default));
    std::fs::create_dir_all(&dir).with_context(|| format!("creating {}", dir.display()))?;
    Ok(dir)
}

fn context(scene: &SceneState, cfg: &ExperimentConfig) -> Result<PlanningContext> {
    let cache = match &cfg.heatmap_cache_dir {
        Some(d) => HeatmapCache::with_dir(d),
        None => HeatmapCache::new(),
    };
    Ok(PlanningContext::new(scene, cfg.feasibility.clone(), Arc::new(cache))?)
}

fn cmd_plan(cli: &Cli, s: &Setup) -> Result<()> {
    let cfg = experiment_config(cli, s)?;
    let task = task_by_id(cfg.task).expect("validated task");
    let (goal, distances) = goal_pipeline(&task.objects, backend(&cfg)?.as_ref(), &cfg.goal_params())?;
    let scene = experiment_scenes(&cfg)?.remove(0);
    let ctx = context(&scene, &cfg)?;
    let seed = cfg.rep_seed(0);
    let p = plan_rep(&cfg, &ctx, &goal, &distances, seed).map_err(anyhow::Error::msg)?;
    let dir = out_dir(cli, "out/plan")?;
    let trace = PlanTrace {
        method: cfg.method.to_string(),
        scene_hash: ctx.scene_hash.clone(),
        seed: rng::child_seed(seed, "exec", 0),
        config_index: p.config_index,
        grop: cfg.grop.clone(),
        feasibility: cfg.feasibility.clone(),
        config: p.config,
        plan: p.plan,
    };
    scene.save(&dir.join("plan.scene"))?;
    trace.config.save(&dir.join("plan.goal"))?;
    trace.save(&dir.join("plan.plan.toml"))?;
    println!("task {}  env {}  method {}  seed {}", cfg.task, cfg.environment, cfg.method, seed);
    for a in goal.relations.iter() {
        println!("  {a}");
    }
    let tp = &trace.plan.task_plan;
    for (o, side) in tp.order.iter().zip(&tp.sides) {
        println!("  unload {o} from {side}");
    }
    println!(
        "config {}  plan {}  F {:.3}  C {:.3}  U {:.3}",
        trace.config_index, trace.plan.plan_index, trace.plan.feasibility, trace.plan.cost, trace.plan.utility
    );
    println!("wrote {}", dir.join("plan.plan.toml").display());
    Ok(())
}

fn cmd_heatmap(cli: &Cli, a: &HeatmapArgs) -> Result<()> {
    let cfg = experiment_config(cli, &a.setup)?;
    let scene = experiment_scenes(&cfg)?.remove(0);
    let ctx = context(&scene, &cfg)?;
    let c = scene.target().center.position();
    let y = Point2::new(a.x.unwrap_or(c.x), a.y.unwrap_or(c.y));
    if !scene.target().rect().contains(y) {
        bail!("unload point ({:.3}, {:.3}) is not on the target table", y.x, y.y);
    }
    let dir = out_dir(cli, "out/heatmap")?;
    let sides: Vec<Side> = a.side.map(|s| vec![s]).unwrap_or_else(|| Side::ALL.to_vec());
    let mut maps = Vec::new();
    for side in sides {
        let h = ctx.heatmap(y, side);
        write_heatmap(&h, &cfg.feasibility, &dir, side.as_str())?;
        println!("{side:>5}  weighted mean {:.3}  max {:.3}", weighted_mean(&h), h.values().iter().cloned().fold(0.0, f64::max));
        maps.push(h);
    }
    let refs: Vec<&Heatmap> = maps.iter().map(|h| h.as_ref()).collect();
    write_overlay(&scene, &refs, &dir.join("overlay.ppm"))?;
    println!("wrote {}", dir.display());
    Ok(())
}

fn cmd_run(cli: &Cli, s: &Setup) -> Result<()> {
    let cfg = experiment_config(cli, s)?;
    let dir = out_dir(cli, "out/run")?;
    let report = run_experiment(&cfg, backend(&cfg)?.as_ref(), Some(&dir))?;
    print!("{}", report.to_table());
    println!("wrote {}", dir.display());
    Ok(())
}

fn cmd_scenarios(cli: &Cli, a: &ScenarioArgs) -> Result<()> {
    if a.count == 0 {
        bail!("--count must be at least 1");
    }
    let mut setup = a.setup.clone();
    setup.env = Some(setup.env.unwrap_or(EnvKind::Random));
    let cfg = experiment_config(cli, &setup)?;
    let base = match &cfg.scene {
        Some(p) => load_scene(p)?,
        None => dining_scene(&task_by_id(cfg.task).expect("validated task").objects, cfg.seed),
    };
    let dir = out_dir(cli, "out/scenarios")?;
    let scenes = make_scenarios(cfg.environment, &base, a.count, &mut rng::stream(cfg.seed, "scenarios", 0));
    for (i, s) in scenes.iter().enumerate() {
        let path = dir.join(format!("scene_{i:03}.scene"));
        s.save(&path)?;
        let names: Vec<String> = s.obstacles.iter().map(|o| o.id.clone()).collect();
        println!("{}  obstacles [{}]", path.display(), names.join(", "));
    }
    Ok(())
}

fn check_trace(t: &PlanTrace, scene: Option<&SceneState>) -> Vec<String> {
    let mut bad = t.config.violations();
    let p = &t.plan;
    let u = &t.grop.utility;
    let n = p.steps.len().max(1) as f64;
    let f = p.steps.iter().map(|s| s.feasibility).sum::<f64>() / n;
    let c: f64 = p.steps.iter().map(|s| s.motion_cost + u.manipulation_cost).sum();
    if (f - p.feasibility).abs() > 1e-9 {
        bad.push(format!("F {} is not the mean pair feasibility {f}", p.feasibility));
    }
    if (c - p.cost).abs() > 1e-9 {
        bad.push(format!("C {} is not the summed pair cost {c}", p.cost));
    }
    if (u.success_bonus * p.feasibility - p.cost - p.utility).abs() > 1e-9 {
        bad.push(format!("U {} is not R*F - C", p.utility));
    }
    if p.trajectories.len() != p.steps.len() {
        bad.push(format!("{} trajectories for {} pairs", p.trajectories.len(), p.steps.len()));
    }
    for (i, (tr, st)) in p.trajectories.iter().zip(&p.steps).enumerate() {
        if (polyline_length(&tr.waypoints) - tr.cost).abs() > 1e-9 || (tr.cost - st.motion_cost).abs() > 1e-9 {
            bad.push(format!("pair {i}: trajectory length disagrees with its cost"));
        }
    }
    if let Some(s) = scene {
        if s.content_hash() != t.scene_hash {
            bad.push("scene hash does not match the trace".into());
        }
        if let Err(e) = simulate(&p.task_plan, s, &supports(&t.config)) {
            bad.push(format!("task plan: {e}"));
        }
        for (i, tr) in p.trajectories.iter().enumerate() {
            if let Some(w) = tr.waypoints.iter().find(|w| !s.disc_free(w.position(), s.robot.radius)) {
                bad.push(format!("pair {i}: waypoint ({:.3}, {:.3}) in collision", w.x, w.y));
            }
        }
    }
    bad
}

fn validate_file(path: &Path, scene: Option<&SceneState>) -> Result<Vec<String>> {
    let name = path.file_name().map(|n| n.to_string_lossy().to_string()).unwrap_or_default();
    Ok(if name.ends_with(".scene") {
        load_scene(path)?;
        Vec::new()
    } else if name.ends_with(".goal") {
        GoalConfiguration::load(path)?.violations()
    } else if name.ends_with(".plan.toml") {
        check_trace(&PlanTrace::load(path).map_err(anyhow::Error::msg)?, scene)
    } else if name.ends_with(".toml") {
        ExperimentConfig::load(path).map_err(anyhow::Error::msg)?;
        Vec::new()
    } else {
        bail!("unrecognized file type");
    })
}

fn cmd_validate(a: &ValidateArgs) -> Result<()> {
    let scene = a.scene.as_deref().map(load_scene).transpose()?;
    let mut failed = 0;
    for f in &a.files {
        match validate_file(f, scene.as_ref()) {
            Ok(v) if v.is_empty() => println!("ok    {}", f.display()),
            Ok(v) => {
                failed += 1;
                println!("FAIL  {}", f.display());
                for m in v {
                    println!("      {m}");
                }
            }
            Err(e) => {
                failed += 1;
                println!("FAIL  {}: {e:#}", f.display());
            }
        }
    }
    if failed > 0 {
        bail!("{failed} of {} file(s) failed validation", a.files.len());
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Plan(s) => cmd_plan(&cli, s),
        Command::Heatmap(a) => cmd_heatmap(&cli, a),
        Command::Run(s) => cmd_run(&cli, s),
        Command::Scenarios(a) => cmd_scenarios(&cli, a),
        Command::Validate(a) => cmd_validate(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
