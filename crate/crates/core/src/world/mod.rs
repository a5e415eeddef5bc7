//! Scene description, occupancy grids and symbolic standing locations.

pub mod grid;
pub mod locations;
pub mod scene;

pub use grid::{flood_fill, inflate, rasterize, NavGrid, OccupancyGrid, NEIGHBOURS};
pub use locations::{
    band_for, pickup_pose, symbolic_locations, symbolic_locations_with, BandParams, Side, SymbolicLocation,
};
pub use scene::{
    load_scene, GridSpec, ObjectSpec, Obstacle, ObstacleKind, RobotSpec, SceneError, SceneState, FORMAT_VERSION,
};
