use crate::feasibility::FeasibilityParams;
use crate::grounding::SamplerParams;
use crate::planning::GropParams;
use crate::scenarios::EnvKind;
use serde::{Deserialize, Serialize};
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    LlmGrop,
    Tpra,
    Latp,
    GropOnly,
}

impl Method {
    pub const ALL: [Method; 4] = [Method::LlmGrop, Method::Tpra, Method::Latp, Method::GropOnly];

    pub fn as_str(&self) -> &'static str {
        match self {
            Method::LlmGrop => "llm_grop",
            Method::Tpra => "tpra",
            Method::Latp => "latp",
            Method::GropOnly => "grop_only",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Method {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Method::ALL
            .into_iter()
            .find(|m| m.as_str() == s)
            .ok_or_else(|| format!("unknown method '{s}' (expected llm_grop, tpra, latp or grop_only)"))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BackendKind {
    Mock,
    Http,
}

impl FromStr for BackendKind {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "mock" => Ok(BackendKind::Mock),
            "http" => Ok(BackendKind::Http),
            _ => Err(format!("unknown backend '{s}' (expected mock or http)")),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct GoalGenOverrides {
    pub max_attempts: u32,
    pub distance_retries: u32,
}

impl Default for GoalGenOverrides {
    fn default() -> Self {
        let d = crate::llm::GoalGenParams::default();
        Self { max_attempts: d.max_attempts, distance_retries: d.distance_retries }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub task: u32,
    #[serde(default = "default_env")]
    pub environment: EnvKind,
    #[serde(default = "default_method")]
    pub method: Method,
    #[serde(default = "default_reps")]
    pub repetitions: usize,
    #[serde(default, with = "crate::rng::wide_seed")]
    pub seed: u64,
    /// Explicit per-repetition seeds; derived from `seed` when empty.
    #[serde(default, with = "crate::rng::wide_seed::vec")]
    pub seeds: Vec<u64>,
    #[serde(default = "default_backend")]
    pub backend: BackendKind,
    /// Directory of mock scripts.
    #[serde(default = "default_mock_dir")]
    pub mock_dir: PathBuf,
    /// Scene file to use instead of the built-in dining scene.
    #[serde(default)]
    pub scene: Option<PathBuf>,
    /// Worker threads, 0 for one per core.
    #[serde(default)]
    pub workers: usize,
    /// Write heatmap images for the first repetition.
    #[serde(default = "yes")]
    pub export_heatmaps: bool,
    #[serde(default)]
    pub heatmap_cache_dir: Option<PathBuf>,
    #[serde(default)]
    pub goalgen: GoalGenOverrides,
    #[serde(default)]
    pub sampler: SamplerParams,
    #[serde(default)]
    pub feasibility: FeasibilityParams,
    #[serde(default)]
    pub grop: GropParams,
}

fn default_env() -> EnvKind {
    EnvKind::Easy
}
fn default_method() -> Method {
    Method::LlmGrop
}
fn default_reps() -> usize {
    20
}
fn default_backend() -> BackendKind {
    BackendKind::Mock
}
fn default_mock_dir() -> PathBuf {
    PathBuf::from("fixtures/llm")
}
fn yes() -> bool {
    true
}

impl ExperimentConfig {
    pub fn new(task: u32, environment: EnvKind, method: Method, repetitions: usize, seed: u64) -> Self {
        let mut c: Self = toml::from_str(&format!("task = {task}")).expect("minimal config parses");
        c.environment = environment;
        c.method = method;
        c.repetitions = repetitions;
        c.seed = seed;
        c
    }

    pub fn from_toml_str(s: &str) -> Result<Self, String> {
        let c: Self = toml::from_str(s).map_err(|e| e.to_string())?;
        c.validate()?;
        Ok(c)
    }

    /// Reads a config; relative paths inside it resolve against its directory.
    pub fn load(path: &Path) -> Result<Self, String> {
        let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
        let mut c = Self::from_toml_str(&text).map_err(|e| format!("{}: {e}", path.display()))?;
        let base = path.parent().unwrap_or(Path::new("."));
        let fix = |p: &mut PathBuf| {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        };
        fix(&mut c.mock_dir);
        if let Some(s) = c.scene.as_mut() {
            fix(s);
        }
        if let Some(s) = c.heatmap_cache_dir.as_mut() {
            fix(s);
        }
        Ok(c)
    }

    pub fn validate(&self) -> Result<(), String> {
        if crate::tasks::task_by_id(self.task).is_none() {
            return Err(format!("unknown task {}", self.task));
        }
        if self.repetitions == 0 {
            return Err("repetitions must be at least 1".into());
        }
        if !self.seeds.is_empty() && self.seeds.len() != self.repetitions {
            return Err(format!("{} seeds given for {} repetitions", self.seeds.len(), self.repetitions));
        }
        if self.goalgen.max_attempts == 0 || self.goalgen.distance_retries == 0 {
            return Err("goal generation attempts must be at least 1".into());
        }
        self.sampler.validate().map_err(|e| e.to_string())?;
        self.feasibility.validate().map_err(|e| e.to_string())?;
        self.grop.validate().map_err(|e| e.to_string())?;
        Ok(())
    }

    pub fn goal_params(&self) -> crate::llm::GoalGenParams {
        crate::llm::GoalGenParams {
            max_attempts: self.goalgen.max_attempts,
            distance_retries: self.goalgen.distance_retries,
            ..Default::default()
        }
    }

    pub fn rep_seed(&self, rep: usize) -> u64 {
        self.seeds.get(rep).copied().unwrap_or_else(|| crate::rng::child_seed(self.seed, "rep", rep as u64))
    }
}
