//! From symbolic goals to metric tabletop configurations.

pub mod layout;
pub mod sampler;

pub use layout::{build_nominal_layout, NominalLayout};
pub use sampler::{
    margin_factor, random_configuration, rank_configurations, sample_configurations, score_configuration,
    GoalConfiguration, SamplerParams, MARGIN_SCALE,
};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum GroundingError {
    #[error("goal has no objects")]
    Empty,
    #[error("no distance suggestion for '{0}'")]
    MissingDistance(String),
    #[error("cannot derive a position for '{0}' from the relations")]
    Unreachable(String),
    #[error("unknown object '{0}'")]
    UnknownObject(String),
    #[error("no configuration found; '{0}' ran out of sampling attempts")]
    Exhausted(String),
    #[error("{0}")]
    Params(String),
}
