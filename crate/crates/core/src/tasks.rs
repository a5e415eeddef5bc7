//! Object catalog and the benchmark task list.

use crate::world::ObjectSpec;
use serde::{Deserialize, Serialize};

/// `(id, footprint radius in meters, supports stacking)`.
pub const CATALOG: &[(&str, f64, bool)] = &[
    ("dinner_plate", 0.04, true),
    ("dinner_fork", 0.01, false),
    ("dinner_knife", 0.01, false),
    ("butter_knife", 0.01, false),
    ("bread_plate", 0.03, true),
    ("water_cup", 0.025, false),
    ("bread", 0.02, false),
    ("mug", 0.025, true),
    ("mug_mat", 0.03, true),
    ("mug_lid", 0.025, false),
    ("fruit_bowl", 0.04, true),
    ("strawberry", 0.01, false),
];

pub fn catalog_entry(id: &str) -> Option<(f64, bool)> {
    CATALOG.iter().find(|(i, _, _)| *i == id).map(|(_, r, s)| (*r, *s))
}

/// Catalog object starting on `table` at `offset` in that table's frame.
pub fn object_spec(id: &str, table: &str, offset: [f64; 2]) -> Option<ObjectSpec> {
    let (r, s) = catalog_entry(id)?;
    Some(ObjectSpec {
        id: id.to_string(),
        footprint_radius: r,
        supports_stacking: s,
        initial_location: table.to_string(),
        initial_offset: offset,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TaskSpec {
    pub id: u32,
    pub objects: Vec<String>,
    /// Task 8 was only run in simulation and task 9 only on hardware.
    pub simulated: bool,
}

fn task(id: u32, objects: &[&str], simulated: bool) -> TaskSpec {
    TaskSpec { id, objects: objects.iter().map(|s| s.to_string()).collect(), simulated }
}

/// The nine rearrangement tasks.
pub fn table1() -> Vec<TaskSpec> {
    vec![
        task(1, &["dinner_plate", "dinner_fork", "dinner_knife"], true),
        task(2, &["bread_plate", "water_cup", "bread"], true),
        task(3, &["mug", "bread_plate", "mug_mat"], true),
        task(4, &["fruit_bowl", "mug", "strawberry"], true),
        task(5, &["mug", "dinner_plate", "mug_lid"], true),
        task(6, &["dinner_plate", "dinner_fork", "mug", "mug_lid"], true),
        task(7, &["dinner_plate", "dinner_fork", "dinner_knife", "strawberry"], true),
        task(8, &["dinner_plate", "dinner_fork", "dinner_knife", "mug", "mug_lid"], true),
        task(9, &["dinner_plate", "dinner_fork", "dinner_knife", "water_cup", "strawberry"], false),
    ]
}

pub fn task_by_id(id: u32) -> Option<TaskSpec> {
    table1().into_iter().find(|t| t.id == id)
}
