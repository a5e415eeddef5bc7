use super::scene::{GridSpec, SceneState};
use crate::geometry::{Point2, Pose2D, Rect};
use serde::{Deserialize, Serialize};
use std::collections::VecDeque;

/// Row-major boolean occupancy, `true` = occupied.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OccupancyGrid {
    pub resolution: f64,
    pub origin: Pose2D,
    pub width: usize,
    pub height: usize,
    pub cells: Vec<bool>,
}

/// 8-neighbour offsets; the first four are axis moves.
pub const NEIGHBOURS: [(i64, i64); 8] = [
    (1, 0),
    (-1, 0),
    (0, 1),
    (0, -1),
    (1, 1),
    (1, -1),
    (-1, 1),
    (-1, -1),
];

impl OccupancyGrid {
    pub fn new_free(spec: &GridSpec) -> Self {
        Self {
            resolution: spec.resolution,
            origin: spec.origin,
            width: spec.width,
            height: spec.height,
            cells: vec![false; spec.width * spec.height],
        }
    }

    pub fn index(&self, ix: usize, iy: usize) -> usize {
        iy * self.width + ix
    }

    pub fn occupied(&self, ix: usize, iy: usize) -> bool {
        self.cells[self.index(ix, iy)]
    }

    pub fn set(&mut self, ix: usize, iy: usize, v: bool) {
        let i = self.index(ix, iy);
        self.cells[i] = v;
    }

    pub fn cell_center(&self, ix: usize, iy: usize) -> Point2 {
        Point2::new(
            self.origin.x + (ix as f64 + 0.5) * self.resolution,
            self.origin.y + (iy as f64 + 0.5) * self.resolution,
        )
    }

    pub fn cell_of(&self, p: Point2) -> Option<(usize, usize)> {
        let fx = ((p.x - self.origin.x) / self.resolution).floor();
        let fy = ((p.y - self.origin.y) / self.resolution).floor();
        if fx < 0.0 || fy < 0.0 || fx >= self.width as f64 || fy >= self.height as f64 {
            return None;
        }
        Some((fx as usize, fy as usize))
    }

    pub fn occupied_count(&self) -> usize {
        self.cells.iter().filter(|c| **c).count()
    }

    /// Valid in-bounds neighbour of `(ix, iy)` by offset.
    pub fn offset(&self, ix: usize, iy: usize, d: (i64, i64)) -> Option<(usize, usize)> {
        let nx = ix as i64 + d.0;
        let ny = iy as i64 + d.1;
        if nx < 0 || ny < 0 || nx >= self.width as i64 || ny >= self.height as i64 {
            None
        } else {
            Some((nx as usize, ny as usize))
        }
    }

    /// Diagonal moves may not cut a corner of an occupied cell.
    pub fn move_allowed(&self, ix: usize, iy: usize, d: (i64, i64)) -> Option<(usize, usize)> {
        let (nx, ny) = self.offset(ix, iy, d)?;
        if self.occupied(nx, ny) {
            return None;
        }
        if d.0 != 0 && d.1 != 0 && (self.occupied(nx, iy) || self.occupied(ix, ny)) {
            return None;
        }
        Some((nx, ny))
    }
}

/// A cell is occupied iff its center lies in some table or obstacle rectangle.
pub fn rasterize(scene: &SceneState) -> OccupancyGrid {
    let mut g = OccupancyGrid::new_free(&scene.grid);
    let rects: Vec<Rect> = scene.boxes().map(|o| o.rect()).collect();
    for iy in 0..g.height {
        for ix in 0..g.width {
            let c = g.cell_center(ix, iy);
            if rects.iter().any(|r| r.contains(c)) {
                g.set(ix, iy, true);
            }
        }
    }
    g
}

/// Grid for base motion: cells whose center cannot hold the robot disc are
/// blocked, and `reachable` marks the free component holding the start.
#[derive(Clone, Debug)]
pub struct NavGrid {
    pub grid: OccupancyGrid,
    pub reachable: Vec<bool>,
    pub start: (usize, usize),
}

pub fn inflate(scene: &SceneState, radius: f64) -> OccupancyGrid {
    let mut g = OccupancyGrid::new_free(&scene.grid);
    for iy in 0..g.height {
        for ix in 0..g.width {
            let c = g.cell_center(ix, iy);
            g.set(ix, iy, !scene.disc_free(c, radius));
        }
    }
    g
}

/// Cells connected to `start` under the planner's move rules.
pub fn flood_fill(grid: &OccupancyGrid, start: (usize, usize)) -> Vec<bool> {
    let mut seen = vec![false; grid.cells.len()];
    if grid.occupied(start.0, start.1) {
        return seen;
    }
    let mut queue = VecDeque::from([start]);
    seen[grid.index(start.0, start.1)] = true;
    while let Some((x, y)) = queue.pop_front() {
        for d in NEIGHBOURS {
            if let Some((nx, ny)) = grid.move_allowed(x, y, d) {
                let i = grid.index(nx, ny);
                if !seen[i] {
                    seen[i] = true;
                    queue.push_back((nx, ny));
                }
            }
        }
    }
    seen
}

impl NavGrid {
    pub fn build(scene: &SceneState) -> Self {
        let grid = inflate(scene, scene.robot.radius);
        let start = grid
            .cell_of(scene.robot.pose.position())
            .expect("validated start lies on grid");
        let reachable = flood_fill(&grid, start);
        Self { grid, reachable, start }
    }

    pub fn is_reachable(&self, p: Point2) -> bool {
        match self.grid.cell_of(p) {
            Some((ix, iy)) => self.reachable[self.grid.index(ix, iy)],
            None => false,
        }
    }
}
