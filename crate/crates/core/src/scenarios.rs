//! Desk-scale dining scenes and the chair environments used by experiments.

use crate::geometry::{Pose2D, Rect};
use crate::rng::Rng;
use crate::tasks::object_spec;
use crate::world::{GridSpec, NavGrid, Obstacle, ObstacleKind, RobotSpec, SceneState, FORMAT_VERSION};
use rand::Rng as _;
use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;

pub const TABLE_HALF: [f64; 2] = [0.4, 0.2];
pub const SIDE_TABLE_X: f64 = 2.5;
/// Chair footprint with its long side along the table edge.
pub const CHAIR_HALF: [f64; 2] = [0.5, 0.25];
/// Gap between a placed chair and the table edge.
pub const CHAIR_GAP: f64 = 0.01;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EnvKind {
    Easy,
    ChairTop,
    ChairBottom,
    Random,
}

impl EnvKind {
    pub const ALL: [EnvKind; 4] = [EnvKind::Easy, EnvKind::ChairTop, EnvKind::ChairBottom, EnvKind::Random];

    pub fn as_str(&self) -> &'static str {
        match self {
            EnvKind::Easy => "easy",
            EnvKind::ChairTop => "chair_top",
            EnvKind::ChairBottom => "chair_bottom",
            EnvKind::Random => "random",
        }
    }
}

impl fmt::Display for EnvKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for EnvKind {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        EnvKind::ALL
            .into_iter()
            .find(|k| k.as_str() == s)
            .ok_or_else(|| format!("unknown environment '{s}' (expected easy, chair_top, chair_bottom or random)"))
    }
}

/// Three tables in a row: `left` and `right` hold the objects, `center` is the
/// target. The robot starts south of the target table.
pub fn dining_scene(objects: &[String], seed: u64) -> SceneState {
    let table = |id: &str, cx: f64| Obstacle::new(id, ObstacleKind::Table, cx, 0.0, TABLE_HALF[0], TABLE_HALF[1]);
    let n_left = objects.len().div_ceil(2);
    let slots = |k: usize| -> Vec<f64> {
        match k {
            0 => vec![],
            1 => vec![0.0],
            2 => vec![-0.15, 0.15],
            _ => (0..k).map(|i| -0.25 + 0.5 * i as f64 / (k - 1) as f64).collect(),
        }
    };
    let mut specs = Vec::new();
    for (id, x) in objects[..n_left].iter().zip(slots(n_left)) {
        specs.push(object_spec(id, "left", [x, 0.0]).unwrap_or_else(|| panic!("unknown object {id}")));
    }
    for (id, x) in objects[n_left..].iter().zip(slots(objects.len() - n_left)) {
        specs.push(object_spec(id, "right", [x, 0.0]).unwrap_or_else(|| panic!("unknown object {id}")));
    }
    SceneState {
        format_version: FORMAT_VERSION,
        seed,
        target_table: "center".into(),
        robot: RobotSpec { pose: Pose2D::new(0.0, -2.0, std::f64::consts::FRAC_PI_2), radius: 0.3 },
        grid: GridSpec { resolution: 0.05, origin: Pose2D::new(-4.0, -3.0, 0.0), width: 160, height: 120 },
        tables: vec![table("left", -SIDE_TABLE_X), table("center", 0.0), table("right", SIDE_TABLE_X)],
        obstacles: vec![],
        objects: specs,
    }
}

/// Chair centered on the north (`top`) or south side of the target table.
pub fn chair_on_target(scene: &SceneState, top: bool) -> Obstacle {
    let t = scene.target().rect();
    let sign = if top { 1.0 } else { -1.0 };
    let cy = t.cy + sign * (t.hy + CHAIR_GAP + CHAIR_HALF[1]);
    Obstacle::new(if top { "chair_top" } else { "chair_bottom" }, ObstacleKind::Chair, t.cx, cy, CHAIR_HALF[0], CHAIR_HALF[1])
}

/// Scene is usable for rearrangement: valid, and every table holding an
/// object still has a free, reachable pickup pose.
pub fn usable(scene: &SceneState) -> bool {
    if scene.validate().is_err() {
        return false;
    }
    let nav = NavGrid::build(scene);
    scene
        .objects
        .iter()
        .all(|o| crate::world::pickup_pose(scene, &nav, &o.initial_location).is_ok())
}

fn random_chairs(base: &SceneState, rng: &mut Rng) -> Vec<Obstacle> {
    let count = rng.gen_range(1..=3);
    let mut chairs: Vec<Obstacle> = Vec::new();
    let mut tries = 0;
    while chairs.len() < count && tries < 1000 {
        tries += 1;
        let t = base.tables[rng.gen_range(0..base.tables.len())].rect();
        let side = rng.gen_range(0..4);
        let gap = rng.gen_range(0.0..0.15);
        let slide = rng.gen_range(-0.3..0.3);
        let (hx, hy) = if side < 2 { (CHAIR_HALF[0], CHAIR_HALF[1]) } else { (CHAIR_HALF[1], CHAIR_HALF[0]) };
        let (cx, cy) = match side {
            0 => (t.cx + slide, t.max_y() + gap + hy),
            1 => (t.cx + slide, t.min_y() - gap - hy),
            2 => (t.max_x() + gap + hx, t.cy + slide * 0.5),
            _ => (t.min_x() - gap - hx, t.cy + slide * 0.5),
        };
        let r = Rect::new(cx, cy, hx, hy);
        if base.boxes().chain(&chairs).any(|b| b.rect().intersects(&r)) {
            continue;
        }
        let id = format!("chair{}", base.obstacles.len() + chairs.len());
        let mut trial = base.clone();
        trial.obstacles.extend(chairs.iter().cloned());
        trial.obstacles.push(Obstacle::new(&id, ObstacleKind::Chair, cx, cy, hx, hy));
        if usable(&trial) {
            chairs.push(Obstacle::new(&id, ObstacleKind::Chair, cx, cy, hx, hy));
        }
    }
    chairs
}

/// `count` scenes of the given kind built on `base`, keeping its obstacles.
/// Easy adds nothing, the fixed kinds one chair, random scenes one to three
/// chairs beside random table sides.
pub fn make_scenarios(kind: EnvKind, base: &SceneState, count: usize, rng: &mut Rng) -> Vec<SceneState> {
    (0..count)
        .map(|i| {
            let mut s = base.clone();
            s.seed = base.seed.wrapping_add(i as u64);
            match kind {
                EnvKind::Easy => {}
                EnvKind::ChairTop => s.obstacles.push(chair_on_target(&s, true)),
                EnvKind::ChairBottom => s.obstacles.push(chair_on_target(&s, false)),
                EnvKind::Random => {
                    let extra = random_chairs(&s, rng);
                    s.obstacles.extend(extra);
                }
            }
            s
        })
        .collect()
}
