use super::grid::NavGrid;
use super::scene::{SceneError, SceneState};
use crate::geometry::{Point2, Pose2D, Rect};
use serde::{Deserialize, Serialize};
use std::fmt;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    North,
    South,
    East,
    West,
}

impl Side {
    pub const ALL: [Side; 4] = [Side::North, Side::South, Side::East, Side::West];

    pub fn as_str(&self) -> &'static str {
        match self {
            Side::North => "north",
            Side::South => "south",
            Side::East => "east",
            Side::West => "west",
        }
    }

    /// Outward unit normal of the table edge.
    pub fn normal(&self) -> (f64, f64) {
        match self {
            Side::North => (0.0, 1.0),
            Side::South => (0.0, -1.0),
            Side::East => (1.0, 0.0),
            Side::West => (-1.0, 0.0),
        }
    }
}

impl std::str::FromStr for Side {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Side::ALL
            .into_iter()
            .find(|x| x.as_str() == s)
            .ok_or_else(|| format!("unknown side '{s}' (expected north, south, east or west)"))
    }
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Band geometry shared by every table side.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BandParams {
    /// Along-edge length in meters.
    pub length: f64,
    /// Depth away from the edge in meters.
    pub depth: f64,
    pub cell_size: f64,
}

impl Default for BandParams {
    fn default() -> Self {
        Self { length: 2.4, depth: 0.8, cell_size: 0.1 }
    }
}

/// A standing region next to one side of a table, divided into square cells.
/// Column 0 is at the west (or south) end; row 0 touches the near edge.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SymbolicLocation {
    pub id: String,
    pub table_id: String,
    pub side: Side,
    pub region: Rect,
    pub cols: usize,
    pub rows: usize,
    pub cell_size: f64,
}

impl SymbolicLocation {
    pub fn cell_count(&self) -> usize {
        self.cols * self.rows
    }

    pub fn cell_center(&self, col: usize, row: usize) -> Point2 {
        let along = (col as f64 + 0.5) * self.cell_size;
        let out = (row as f64 + 0.5) * self.cell_size;
        let r = &self.region;
        match self.side {
            Side::North => Point2::new(r.min_x() + along, r.min_y() + out),
            Side::South => Point2::new(r.min_x() + along, r.max_y() - out),
            Side::East => Point2::new(r.min_x() + out, r.min_y() + along),
            Side::West => Point2::new(r.max_x() - out, r.min_y() + along),
        }
    }

    /// Cell containing `p`, or `None` outside the region.
    pub fn cell_at(&self, p: Point2) -> Option<(usize, usize)> {
        let r = &self.region;
        let (along, out) = match self.side {
            Side::North => (p.x - r.min_x(), p.y - r.min_y()),
            Side::South => (p.x - r.min_x(), r.max_y() - p.y),
            Side::East => (p.y - r.min_y(), p.x - r.min_x()),
            Side::West => (p.y - r.min_y(), r.max_x() - p.x),
        };
        let c = (along / self.cell_size).floor();
        let w = (out / self.cell_size).floor();
        if c < 0.0 || w < 0.0 {
            return None;
        }
        let (c, w) = (c as usize, w as usize);
        // Points on the far boundary belong to the last cell.
        let c = if c == self.cols && along <= self.cols as f64 * self.cell_size + 1e-12 { c - 1 } else { c };
        let w = if w == self.rows && out <= self.rows as f64 * self.cell_size + 1e-12 { w - 1 } else { w };
        (c < self.cols && w < self.rows).then_some((c, w))
    }

    /// Row-major index used by heatmaps.
    pub fn flat(&self, col: usize, row: usize) -> usize {
        row * self.cols + col
    }

    pub fn unflat(&self, i: usize) -> (usize, usize) {
        (i % self.cols, i / self.cols)
    }
}

pub fn band_for(table: &Rect, table_id: &str, side: Side, offset: f64, p: &BandParams) -> SymbolicLocation {
    let (half_len, near, far) = (0.5 * p.length, offset, offset + p.depth);
    let region = match side {
        Side::North => Rect::from_bounds(table.cx - half_len, table.max_y() + near, table.cx + half_len, table.max_y() + far),
        Side::South => Rect::from_bounds(table.cx - half_len, table.min_y() - far, table.cx + half_len, table.min_y() - near),
        Side::East => Rect::from_bounds(table.max_x() + near, table.cy - half_len, table.max_x() + far, table.cy + half_len),
        Side::West => Rect::from_bounds(table.min_x() - far, table.cy - half_len, table.min_x() - near, table.cy + half_len),
    };
    SymbolicLocation {
        id: format!("{table_id}:{side}"),
        table_id: table_id.to_string(),
        side,
        region,
        cols: (p.length / p.cell_size).round() as usize,
        rows: (p.depth / p.cell_size).round() as usize,
        cell_size: p.cell_size,
    }
}

/// The four standing bands around a table, offset from its edges by the robot
/// radius. Bands are returned even when obstacles cover them.
pub fn symbolic_locations(scene: &SceneState, table_id: &str) -> Result<Vec<SymbolicLocation>, SceneError> {
    symbolic_locations_with(scene, table_id, &BandParams::default())
}

pub fn symbolic_locations_with(
    scene: &SceneState,
    table_id: &str,
    params: &BandParams,
) -> Result<Vec<SymbolicLocation>, SceneError> {
    let table = scene.table(table_id).ok_or_else(|| SceneError::UnknownTable(table_id.to_string()))?;
    let rect = table.rect();
    Ok(Side::ALL
        .iter()
        .map(|&s| band_for(&rect, table_id, s, scene.robot.radius, params))
        .collect())
}

/// Pose used to load objects from `table_id`: one approach point per side at
/// `robot radius + 0.2` from the edge, keeping the free, reachable one that is
/// closest to the target table.
pub fn pickup_pose(scene: &SceneState, nav: &NavGrid, table_id: &str) -> Result<Pose2D, SceneError> {
    let table = scene.table(table_id).ok_or_else(|| SceneError::UnknownTable(table_id.to_string()))?;
    let rect = table.rect();
    let standoff = scene.robot.radius + 0.2;
    let goal = scene.target().center.position();
    let mut best: Option<(f64, Pose2D)> = None;
    for side in Side::ALL {
        let (nx, ny) = side.normal();
        let p = Point2::new(
            rect.cx + nx * (rect.hx + standoff),
            rect.cy + ny * (rect.hy + standoff),
        );
        if !scene.robot_free(p) || !nav.is_reachable(p) {
            continue;
        }
        let d = p.distance(&goal);
        if best.map_or(true, |(bd, _)| d < bd - 1e-12) {
            best = Some((d, Pose2D::facing(p, rect.center())));
        }
    }
    best.map(|(_, pose)| pose).ok_or_else(|| SceneError::NoApproach(table_id.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn desk() -> Rect {
        Rect::new(0.0, 0.0, 0.4, 0.2)
    }

    #[test]
    fn bands_are_24_by_8() {
        for side in Side::ALL {
            let b = band_for(&desk(), "t", side, 0.3, &BandParams::default());
            assert_eq!((b.cols, b.rows), (24, 8));
            let near = b.cell_center(12, 0);
            let dist = desk().distance_to(near);
            assert!((dist - 0.35).abs() < 1e-9, "{side}: {dist}");
        }
    }

    #[test]
    fn cell_lookup_inverts_centers() {
        for side in Side::ALL {
            let b = band_for(&desk(), "t", side, 0.3, &BandParams::default());
            for col in 0..b.cols {
                for row in 0..b.rows {
                    assert_eq!(b.cell_at(b.cell_center(col, row)), Some((col, row)));
                }
            }
        }
    }

    proptest! {
        #[test]
        fn bands_clear_of_table(
            cx in -2.0..2.0f64, cy in -2.0..2.0f64, hx in 0.1..1.0f64, hy in 0.1..1.0f64,
        ) {
            let t = Rect::new(cx, cy, hx, hy);
            for side in Side::ALL {
                let b = band_for(&t, "t", side, 0.3, &BandParams::default());
                prop_assert!(!b.region.intersects(&t));
                let gx = ((b.region.cx - t.cx).abs() - b.region.hx - t.hx).max(0.0);
                let gy = ((b.region.cy - t.cy).abs() - b.region.hy - t.hy).max(0.0);
                let gap = gx.hypot(gy);
                prop_assert!(gap >= 0.3 - 1e-9);
                // Long axis runs along the edge.
                let (w, h) = (2.0 * b.region.hx, 2.0 * b.region.hy);
                match side {
                    Side::North | Side::South => prop_assert!(w > h),
                    Side::East | Side::West => prop_assert!(h > w),
                }
            }
        }
    }
}
