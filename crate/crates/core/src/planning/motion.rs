use crate::geometry::{Point2, Pose2D};
use crate::world::{OccupancyGrid, NEIGHBOURS};
use serde::{Deserialize, Serialize};
use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::f64::consts::SQRT_2;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum MotionError {
    #[error("start ({0:.2}, {1:.2}) is in collision or off the grid")]
    StartBlocked(f64, f64),
    #[error("goal ({0:.2}, {1:.2}) is in collision or off the grid")]
    GoalBlocked(f64, f64),
    #[error("no path from ({0:.2}, {1:.2}) to ({2:.2}, {3:.2})")]
    NoPath(f64, f64, f64, f64),
}

/// Grid path length as a count of axis and diagonal moves, so equal paths
/// compare equal regardless of summation order.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct StepCost {
    pub straight: u32,
    pub diagonal: u32,
}

impl StepCost {
    /// Length in cells.
    pub fn cells(&self) -> f64 {
        self.straight as f64 + self.diagonal as f64 * SQRT_2
    }

    fn step(self, d: (i64, i64)) -> Self {
        if d.0 != 0 && d.1 != 0 {
            Self { diagonal: self.diagonal + 1, ..self }
        } else {
            Self { straight: self.straight + 1, ..self }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub waypoints: Vec<Pose2D>,
    /// Polyline length in meters.
    pub cost: f64,
}

impl Trajectory {
    pub fn empty() -> Self {
        Self { waypoints: Vec::new(), cost: 0.0 }
    }

    pub fn start(&self) -> Option<Pose2D> {
        self.waypoints.first().copied()
    }

    pub fn end(&self) -> Option<Pose2D> {
        self.waypoints.last().copied()
    }
}

pub fn polyline_length(points: &[Pose2D]) -> f64 {
    points.windows(2).map(|w| w[0].position().distance(&w[1].position())).sum()
}

#[derive(Clone, Copy, PartialEq)]
struct Open {
    f: f64,
    g: StepCost,
    cell: usize,
}

impl Eq for Open {}

impl Ord for Open {
    fn cmp(&self, other: &Self) -> Ordering {
        other.f.total_cmp(&self.f).then_with(|| other.cell.cmp(&self.cell))
    }
}

impl PartialOrd for Open {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

fn octile(a: (usize, usize), b: (usize, usize)) -> f64 {
    let dx = a.0.abs_diff(b.0) as f64;
    let dy = a.1.abs_diff(b.1) as f64;
    dx.max(dy) + (SQRT_2 - 1.0) * dx.min(dy)
}

/// Best-first search over free cells. With `goal` it is A* under the octile
/// heuristic; without, Dijkstra over the whole component.
fn search(
    grid: &OccupancyGrid,
    start: (usize, usize),
    goal: Option<(usize, usize)>,
) -> (Vec<Option<StepCost>>, Vec<usize>) {
    let n = grid.cells.len();
    let mut best: Vec<Option<StepCost>> = vec![None; n];
    let mut parent = vec![usize::MAX; n];
    let mut closed = vec![false; n];
    let h = |c: (usize, usize)| goal.map_or(0.0, |g| octile(c, g));
    let s = grid.index(start.0, start.1);
    best[s] = Some(StepCost::default());
    let mut open = BinaryHeap::from([Open { f: h(start), g: StepCost::default(), cell: s }]);
    while let Some(Open { g, cell, .. }) = open.pop() {
        if closed[cell] {
            continue;
        }
        closed[cell] = true;
        let (x, y) = (cell % grid.width, cell / grid.width);
        if goal == Some((x, y)) {
            break;
        }
        for d in NEIGHBOURS {
            let Some((nx, ny)) = grid.move_allowed(x, y, d) else { continue };
            let ni = grid.index(nx, ny);
            let ng = g.step(d);
            if best[ni].map_or(true, |b| ng.cells() < b.cells()) {
                best[ni] = Some(ng);
                parent[ni] = cell;
                open.push(Open { f: ng.cells() + h((nx, ny)), g: ng, cell: ni });
            }
        }
    }
    (best, parent)
}

/// A* between two free cells: the cell path (inclusive) and its cost.
pub fn grid_path(grid: &OccupancyGrid, start: (usize, usize), goal: (usize, usize)) -> Option<(Vec<(usize, usize)>, StepCost)> {
    if grid.occupied(start.0, start.1) || grid.occupied(goal.0, goal.1) {
        return None;
    }
    let (best, parent) = search(grid, start, Some(goal));
    let gi = grid.index(goal.0, goal.1);
    let cost = best[gi]?;
    let mut path = vec![goal];
    let mut c = gi;
    while parent[c] != usize::MAX {
        c = parent[c];
        path.push((c % grid.width, c / grid.width));
    }
    path.reverse();
    Some((path, cost))
}

/// Single-source grid distances, used to price many motions from one pose.
#[derive(Clone, Debug)]
pub struct CostField {
    pub source: Pose2D,
    source_cell: (usize, usize),
    costs: Vec<Option<StepCost>>,
    resolution: f64,
    origin: Point2,
    width: usize,
    height: usize,
}

impl CostField {
    pub fn new(grid: &OccupancyGrid, source: Pose2D) -> Result<Self, MotionError> {
        let p = source.position();
        let cell = grid.cell_of(p).filter(|c| !grid.occupied(c.0, c.1)).ok_or(MotionError::StartBlocked(p.x, p.y))?;
        let (costs, _) = search(grid, cell, None);
        Ok(Self {
            source,
            source_cell: cell,
            costs,
            resolution: grid.resolution,
            origin: grid.origin.position(),
            width: grid.width,
            height: grid.height,
        })
    }

    /// Grid cost to a cell, `None` when unreachable.
    pub fn cell_cost(&self, ix: usize, iy: usize) -> Option<StepCost> {
        self.costs[iy * self.width + ix]
    }

    fn cell_of(&self, p: Point2) -> Option<(usize, usize)> {
        let fx = ((p.x - self.origin.x) / self.resolution).floor();
        let fy = ((p.y - self.origin.y) / self.resolution).floor();
        if fx < 0.0 || fy < 0.0 || fx >= self.width as f64 || fy >= self.height as f64 {
            return None;
        }
        Some((fx as usize, fy as usize))
    }

    fn center(&self, c: (usize, usize)) -> Point2 {
        Point2::new(
            self.origin.x + (c.0 as f64 + 0.5) * self.resolution,
            self.origin.y + (c.1 as f64 + 0.5) * self.resolution,
        )
    }

    /// Cost of `plan_motion` between the source and `p`, in either direction.
    pub fn cost_to(&self, p: Point2) -> Option<f64> {
        let s = self.source.position();
        if s == p {
            return Some(0.0);
        }
        let c = self.cell_of(p)?;
        let g = self.cell_cost(c.0, c.1)?;
        Some(s.distance(&self.center(self.source_cell)) + g.cells() * self.resolution + self.center(c).distance(&p))
    }
}

/// Shortest 8-connected path without corner cutting. The polyline runs from
/// `from` through the centers of every visited cell to `to`; its length is
/// the cost. Equal poses give an empty trajectory.
pub fn plan_motion(grid: &OccupancyGrid, from: Pose2D, to: Pose2D) -> Result<Trajectory, MotionError> {
    let (a, b) = (from.position(), to.position());
    if a == b {
        return Ok(Trajectory::empty());
    }
    let sc = grid.cell_of(a).filter(|c| !grid.occupied(c.0, c.1)).ok_or(MotionError::StartBlocked(a.x, a.y))?;
    let gc = grid.cell_of(b).filter(|c| !grid.occupied(c.0, c.1)).ok_or(MotionError::GoalBlocked(b.x, b.y))?;
    let (cells, steps) = grid_path(grid, sc, gc).ok_or(MotionError::NoPath(a.x, a.y, b.x, b.y))?;
    let mut waypoints = vec![from];
    for (i, c) in cells.iter().enumerate() {
        let p = grid.cell_center(c.0, c.1);
        let next = cells.get(i + 1).map(|n| grid.cell_center(n.0, n.1)).unwrap_or(b);
        waypoints.push(Pose2D::facing(p, next));
    }
    waypoints.push(to);
    let cost = a.distance(&grid.cell_center(sc.0, sc.1))
        + steps.cells() * grid.resolution
        + grid.cell_center(gc.0, gc.1).distance(&b);
    Ok(Trajectory { waypoints, cost })
}
