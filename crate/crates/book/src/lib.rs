//! The guide under `book/`. Each chapter is a module doc so `cargo test`
//! runs its listings.

#[doc = include_str!("../../../book/src/introduction.md")]
pub mod introduction {}
#[doc = include_str!("../../../book/src/scenes.md")]
pub mod scenes {}
#[doc = include_str!("../../../book/src/relations.md")]
pub mod relations {}
#[doc = include_str!("../../../book/src/goals.md")]
pub mod goals {}
#[doc = include_str!("../../../book/src/heatmaps.md")]
pub mod heatmaps {}
#[doc = include_str!("../../../book/src/planning.md")]
pub mod planning {}
#[doc = include_str!("../../../book/src/execution.md")]
pub mod execution {}
#[doc = include_str!("../../../book/src/experiments.md")]
pub mod experiments {}
#[doc = include_str!("../../../book/src/formats.md")]
pub mod formats {}
