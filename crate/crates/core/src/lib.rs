pub mod exec;
pub mod experiment;
pub mod feasibility;
pub mod geometry;
pub mod grounding;
pub mod llm;
pub mod planning;
pub mod logic;
pub mod rng;
pub mod scenarios;
pub mod tasks;
pub mod world;
