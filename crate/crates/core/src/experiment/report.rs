use super::config::ExperimentConfig;
use crate::llm::SymbolicGoal;
use serde::{Deserialize, Serialize};
use std::fmt::Write as _;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TrialStatus {
    Success,
    Navigation,
    Manipulation,
    /// No plan could be produced.
    Planning,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrialRow {
    pub rep: usize,
    pub seed: u64,
    pub scene: String,
    pub status: TrialStatus,
    pub config_index: usize,
    pub plan_index: usize,
    pub planned_feasibility: f64,
    pub planned_cost: f64,
    pub utility: f64,
    pub executed_cost: f64,
    pub relation_satisfaction: f64,
    pub goal_verified: Option<bool>,
    pub error: Option<String>,
}

impl TrialRow {
    pub fn planning_failure(rep: usize, seed: u64, scene: String, error: String) -> Self {
        Self {
            rep,
            seed,
            scene,
            status: TrialStatus::Planning,
            config_index: 0,
            plan_index: 0,
            planned_feasibility: 0.0,
            planned_cost: 0.0,
            utility: 0.0,
            executed_cost: 0.0,
            relation_satisfaction: 0.0,
            goal_verified: None,
            error: Some(error),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Aggregates {
    pub trials: usize,
    pub success_rate: f64,
    pub mean_executed_cost: f64,
    pub mean_utility: f64,
    pub mean_relation_satisfaction: f64,
    pub navigation_failures: usize,
    pub manipulation_failures: usize,
    pub planning_failures: usize,
}

impl Aggregates {
    /// Means over all rows, summed in row order.
    pub fn from_rows(rows: &[TrialRow]) -> Self {
        let n = rows.len().max(1) as f64;
        let count = |s: TrialStatus| rows.iter().filter(|r| r.status == s).count();
        let mean = |f: fn(&TrialRow) -> f64| rows.iter().map(f).sum::<f64>() / n;
        Self {
            trials: rows.len(),
            success_rate: count(TrialStatus::Success) as f64 / n,
            mean_executed_cost: mean(|r| r.executed_cost),
            mean_utility: mean(|r| r.utility),
            mean_relation_satisfaction: mean(|r| r.relation_satisfaction),
            navigation_failures: count(TrialStatus::Navigation),
            manipulation_failures: count(TrialStatus::Manipulation),
            planning_failures: count(TrialStatus::Planning),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub task: u32,
    pub environment: String,
    pub method: String,
    pub repetitions: usize,
    pub seed: u64,
    pub goal: Vec<String>,
    pub goal_attempts: u32,
    pub aggregates: Aggregates,
    pub rows: Vec<TrialRow>,
}

impl RunReport {
    pub fn new(cfg: &ExperimentConfig, goal: &SymbolicGoal, rows: Vec<TrialRow>) -> Self {
        Self {
            task: cfg.task,
            environment: cfg.environment.to_string(),
            method: cfg.method.to_string(),
            repetitions: cfg.repetitions,
            seed: cfg.seed,
            goal: goal.relations.iter().map(|a| a.to_string()).collect(),
            goal_attempts: goal.attempts,
            aggregates: Aggregates::from_rows(&rows),
            rows,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes") + "\n"
    }

    pub fn to_jsonl(&self) -> String {
        self.rows.iter().map(|r| serde_json::to_string(r).expect("row serializes") + "\n").collect()
    }

    pub fn to_table(&self) -> String {
        let a = &self.aggregates;
        let mut s = String::new();
        let _ = writeln!(s, "task {}  env {}  method {}  seed {}", self.task, self.environment, self.method, self.seed);
        let _ = writeln!(s, "goal ({} attempt(s)):", self.goal_attempts);
        for g in &self.goal {
            let _ = writeln!(s, "  {g}");
        }
        let _ = writeln!(s);
        let _ = writeln!(
            s,
            "{:>4} {:>20} {:>13} {:>7} {:>8} {:>8} {:>9} {:>9} {:>6}",
            "rep", "seed", "status", "F", "C", "U", "exec_C", "rel_sat", "cfg"
        );
        for r in &self.rows {
            let _ = writeln!(
                s,
                "{:>4} {:>20} {:>13} {:>7.3} {:>8.3} {:>8.3} {:>9.3} {:>9.3} {:>6}",
                r.rep,
                r.seed,
                format!("{:?}", r.status).to_lowercase(),
                r.planned_feasibility,
                r.planned_cost,
                r.utility,
                r.executed_cost,
                r.relation_satisfaction,
                r.config_index
            );
        }
        let _ = writeln!(s);
        let _ = writeln!(s, "trials                      {}", a.trials);
        let _ = writeln!(s, "success rate                {:.3}", a.success_rate);
        let _ = writeln!(s, "mean executed cost          {:.3}", a.mean_executed_cost);
        let _ = writeln!(s, "mean utility                {:.3}", a.mean_utility);
        let _ = writeln!(s, "mean relation satisfaction  {:.3}", a.mean_relation_satisfaction);
        let _ = writeln!(
            s,
            "failures                    navigation {}  manipulation {}  planning {}",
            a.navigation_failures, a.manipulation_failures, a.planning_failures
        );
        s
    }
}
