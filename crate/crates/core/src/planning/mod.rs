//! Task-plan enumeration, grid motion planning and utility-driven selection
//! of task-motion plans.

pub mod grop;
pub mod motion;
pub mod task;
pub mod trace;

pub use grop::{
    evaluate_plan, grop, materialize, select_best_over_configurations, unload_estimates, GropParams, PairStep, PlanningContext, TaskMotionPlan,
    UtilityParams,
};
pub use motion::{grid_path, plan_motion, polyline_length, CostField, MotionError, StepCost, Trajectory};
pub use task::{enumerate_task_plans, pickup_location, simulate, supports, TaskAction, TaskPlan};
pub use trace::PlanTrace;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum PlanningError {
    #[error("no task-level plan achieves the goal")]
    NoTaskPlan,
    #[error("object '{0}' is not in the scene")]
    UnknownObject(String),
    #[error("scene: {0}")]
    Scene(String),
    #[error("motion: {0}")]
    Motion(#[from] MotionError),
    #[error("every task plan is motion-infeasible: {}", .0.join("; "))]
    MotionInfeasible(Vec<String>),
    #[error("no goal configurations to plan for")]
    NoConfigurations,
    #[error("{0}")]
    Params(String),
}
