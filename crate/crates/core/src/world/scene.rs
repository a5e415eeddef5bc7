use crate::geometry::{normalize_angle, Point2, Pose2D, Rect};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::collections::HashSet;
use std::fmt;
use std::path::Path;

pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, thiserror::Error)]
pub enum SceneError {
    #[error("cannot read scene file: {0}")]
    Io(#[from] std::io::Error),
    #[error("scene parse error at line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("invalid scene: {0}")]
    Invariant(String),
    #[error("unknown table '{0}'")]
    UnknownTable(String),
    #[error("no free approach pose around table '{0}'")]
    NoApproach(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ObstacleKind {
    Table,
    Chair,
    Wall,
}

impl fmt::Display for ObstacleKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ObstacleKind::Table => "table",
            ObstacleKind::Chair => "chair",
            ObstacleKind::Wall => "wall",
        })
    }
}

fn table_kind() -> ObstacleKind {
    ObstacleKind::Table
}

/// Axis-aligned box: a table or an obstacle such as a chair.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Obstacle {
    pub id: String,
    #[serde(default = "table_kind")]
    pub kind: ObstacleKind,
    pub center: Pose2D,
    pub half_extents: [f64; 2],
}

impl Obstacle {
    pub fn new(id: &str, kind: ObstacleKind, cx: f64, cy: f64, hx: f64, hy: f64) -> Self {
        Self {
            id: id.to_string(),
            kind,
            center: Pose2D::new(cx, cy, 0.0),
            half_extents: [hx, hy],
        }
    }

    pub fn rect(&self) -> Rect {
        Rect::new(self.center.x, self.center.y, self.half_extents[0], self.half_extents[1])
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ObjectSpec {
    pub id: String,
    pub footprint_radius: f64,
    pub supports_stacking: bool,
    /// Id of the table the object starts on.
    pub initial_location: String,
    /// Start position in that table's frame.
    #[serde(default)]
    pub initial_offset: [f64; 2],
}

impl ObjectSpec {
    /// Natural-language name: the id with underscores as spaces.
    pub fn name(&self) -> String {
        self.id.replace('_', " ")
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RobotSpec {
    pub pose: Pose2D,
    pub radius: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub resolution: f64,
    pub origin: Pose2D,
    pub width: usize,
    pub height: usize,
}

impl GridSpec {
    pub fn bounds(&self) -> Rect {
        Rect::from_bounds(
            self.origin.x,
            self.origin.y,
            self.origin.x + self.width as f64 * self.resolution,
            self.origin.y + self.height as f64 * self.resolution,
        )
    }
}

/// The simulated world. Immutable after loading.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SceneState {
    pub format_version: u32,
    #[serde(with = "crate::rng::wide_seed")]
    pub seed: u64,
    pub target_table: String,
    pub robot: RobotSpec,
    pub grid: GridSpec,
    #[serde(default)]
    pub tables: Vec<Obstacle>,
    #[serde(default)]
    pub obstacles: Vec<Obstacle>,
    #[serde(default)]
    pub objects: Vec<ObjectSpec>,
}

fn line_of(text: &str, offset: usize) -> usize {
    text[..offset.min(text.len())].matches('\n').count() + 1
}

impl SceneState {
    pub fn from_toml_str(text: &str) -> Result<Self, SceneError> {
        let mut scene: SceneState = toml::from_str(text).map_err(|e| SceneError::Parse {
            line: e.span().map(|s| line_of(text, s.start)).unwrap_or(0),
            message: e.message().to_string(),
        })?;
        scene.normalize();
        scene.validate()?;
        Ok(scene)
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).expect("scene serializes")
    }

    pub fn save(&self, path: &Path) -> Result<(), SceneError> {
        std::fs::write(path, self.to_toml_string())?;
        Ok(())
    }

    fn normalize(&mut self) {
        self.robot.pose.theta = normalize_angle(self.robot.pose.theta);
        for o in self.tables.iter_mut().chain(self.obstacles.iter_mut()) {
            o.center.theta = normalize_angle(o.center.theta);
        }
        for t in &mut self.tables {
            t.kind = ObstacleKind::Table;
        }
    }

    /// Content hash of the canonical serialization.
    pub fn content_hash(&self) -> String {
        hex::encode(Sha256::digest(self.to_toml_string().as_bytes()))
    }

    pub fn table(&self, id: &str) -> Option<&Obstacle> {
        self.tables.iter().find(|t| t.id == id)
    }

    pub fn object(&self, id: &str) -> Option<&ObjectSpec> {
        self.objects.iter().find(|o| o.id == id)
    }

    pub fn target(&self) -> &Obstacle {
        self.table(&self.target_table).expect("validated target table")
    }

    /// Tables then obstacles.
    pub fn boxes(&self) -> impl Iterator<Item = &Obstacle> {
        self.tables.iter().chain(self.obstacles.iter())
    }

    /// World position of an object at its start location.
    pub fn initial_position(&self, object: &ObjectSpec) -> Option<Point2> {
        let t = self.table(&object.initial_location)?;
        Some(t.center.position().add(object.initial_offset[0], object.initial_offset[1]))
    }

    /// A disc of `radius` at `p` touches no box and stays on the map.
    pub fn disc_free(&self, p: Point2, radius: f64) -> bool {
        let b = self.grid.bounds();
        if p.x - radius < b.min_x()
            || p.x + radius > b.max_x()
            || p.y - radius < b.min_y()
            || p.y + radius > b.max_y()
        {
            return false;
        }
        self.boxes().all(|o| o.rect().distance_to(p) >= radius)
    }

    pub fn robot_free(&self, p: Point2) -> bool {
        self.disc_free(p, self.robot.radius)
    }

    pub fn validate(&self) -> Result<(), SceneError> {
        let bad = |m: String| Err(SceneError::Invariant(m));
        if self.format_version != FORMAT_VERSION {
            return bad(format!("unsupported format_version {}", self.format_version));
        }
        if !(self.grid.resolution > 0.0) || self.grid.width == 0 || self.grid.height == 0 {
            return bad("grid must have positive resolution and size".into());
        }
        if !(self.robot.radius > 0.0) {
            return bad("robot radius must be positive".into());
        }
        let mut ids = HashSet::new();
        for o in self.boxes() {
            if !ids.insert(o.id.as_str()) {
                return bad(format!("duplicate table/obstacle id '{}'", o.id));
            }
            if !(o.half_extents[0] > 0.0 && o.half_extents[1] > 0.0) {
                return bad(format!("'{}' has non-positive half extents", o.id));
            }
            if o.center.theta.abs() > 1e-9 {
                return bad(format!("'{}' is rotated; boxes must be axis-aligned", o.id));
            }
        }
        for o in &self.obstacles {
            if o.kind == ObstacleKind::Table {
                return bad(format!("obstacle '{}' has kind table; list it under tables", o.id));
            }
        }
        for (i, a) in self.tables.iter().enumerate() {
            for b in self.tables.iter().skip(i + 1) {
                if a.rect().intersects(&b.rect()) {
                    return bad(format!("table '{}' overlaps table '{}'", b.id, a.id));
                }
            }
        }
        for o in &self.obstacles {
            for t in &self.tables {
                if o.rect().intersects(&t.rect()) {
                    return bad(format!("{} '{}' overlaps table '{}'", o.kind, o.id, t.id));
                }
            }
        }
        if self.table(&self.target_table).is_none() {
            return bad(format!("target_table '{}' is not a table", self.target_table));
        }
        let bounds = self.grid.bounds();
        for t in &self.tables {
            if !bounds.contains(t.center.position()) {
                return bad(format!("table '{}' lies outside the grid", t.id));
            }
        }
        let mut obj_ids = HashSet::new();
        for o in &self.objects {
            if !obj_ids.insert(o.id.as_str()) {
                return bad(format!("duplicate object id '{}'", o.id));
            }
            if !(o.footprint_radius > 0.0) {
                return bad(format!("object '{}' footprint_radius must be positive", o.id));
            }
            let Some(t) = self.table(&o.initial_location) else {
                return bad(format!("object '{}' starts on unknown table '{}'", o.id, o.initial_location));
            };
            let p = self.initial_position(o).unwrap();
            if !t.rect().contains_disc(p, o.footprint_radius) {
                return bad(format!("object '{}' does not fit on table '{}'", o.id, t.id));
            }
        }
        for (i, a) in self.objects.iter().enumerate() {
            for b in self.objects.iter().skip(i + 1) {
                if a.initial_location != b.initial_location {
                    continue;
                }
                let pa = self.initial_position(a).unwrap();
                let pb = self.initial_position(b).unwrap();
                if pa.distance(&pb) < a.footprint_radius + b.footprint_radius {
                    return bad(format!("objects '{}' and '{}' overlap", a.id, b.id));
                }
            }
        }
        if !self.robot_free(self.robot.pose.position()) {
            return bad("robot start pose is in collision or off the grid".into());
        }
        Ok(())
    }
}

pub fn load_scene(path: &Path) -> Result<SceneState, SceneError> {
    let text = std::fs::read_to_string(path)?;
    SceneState::from_toml_str(&text)
}
