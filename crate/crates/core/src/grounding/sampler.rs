use super::layout::NominalLayout;
use super::GroundingError;
use crate::geometry::{Point2, Rect};
use crate::logic::{relation_satisfied, RelationKind, RelationSet};
use crate::rng::{self, Rng};
use crate::world::{ObjectSpec, Obstacle};
use rand::Rng as _;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::path::Path;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SamplerParams {
    /// Per-axis standard deviation in meters.
    pub sigma: f64,
    pub max_attempts_per_object: u32,
    /// Number of configurations requested.
    pub m: usize,
    /// Tolerance on axes a relation pins to zero, in meters.
    pub alignment_tol: f64,
}

impl Default for SamplerParams {
    fn default() -> Self {
        Self { sigma: 0.02, max_attempts_per_object: 1000, m: 10, alignment_tol: 0.03 }
    }
}

impl SamplerParams {
    pub fn validate(&self) -> Result<(), GroundingError> {
        if self.sigma > 0.0 && self.max_attempts_per_object > 0 && self.m > 0 && self.alignment_tol > 0.0 {
            Ok(())
        } else {
            Err(GroundingError::Params("sampler parameters must all be positive".into()))
        }
    }
}

/// Metric tabletop arrangement in the target table's frame. Carries the
/// table geometry, footprints and relations so it can be checked on its own.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GoalConfiguration {
    pub table_id: String,
    pub table_center: Point2,
    pub table_half_extents: [f64; 2],
    pub positions: BTreeMap<String, Point2>,
    pub layers: BTreeMap<String, u8>,
    pub radii: BTreeMap<String, f64>,
    /// Unload order that respects stacking.
    pub order: Vec<String>,
    pub relations: RelationSet,
    pub alignment_tol: f64,
    pub source: String,
}

impl GoalConfiguration {
    pub fn table_rect(&self) -> Rect {
        Rect::new(0.0, 0.0, self.table_half_extents[0], self.table_half_extents[1])
    }

    /// World position of an object.
    pub fn world(&self, id: &str) -> Point2 {
        let p = self.positions[id];
        self.table_center.add(p.x, p.y)
    }

    /// Stacking support of `id`, if any.
    pub fn support_of(&self, id: &str) -> Option<&str> {
        self.relations
            .iter()
            .find(|a| a.kind == RelationKind::OnTopOf && a.subject == id)
            .and_then(|a| a.reference_id())
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).expect("configuration serializes")
    }

    pub fn from_toml_str(s: &str) -> Result<Self, GroundingError> {
        toml::from_str(s).map_err(|e| GroundingError::Params(format!("bad goal file: {e}")))
    }

    pub fn save(&self, path: &Path) -> std::io::Result<()> {
        std::fs::write(path, self.to_toml_string())
    }

    pub fn load(path: &Path) -> Result<Self, GroundingError> {
        let text = std::fs::read_to_string(path).map_err(|e| GroundingError::Params(e.to_string()))?;
        Self::from_toml_str(&text)
    }

    /// Violations of the on-table, overlap, stacking and relation rules.
    pub fn violations(&self) -> Vec<String> {
        let mut out = Vec::new();
        let table = self.table_rect();
        for (id, p) in &self.positions {
            if !table.contains_disc(*p, self.radii[id]) {
                out.push(format!("{id} is not fully on the table"));
            }
        }
        let ids: Vec<&String> = self.positions.keys().collect();
        for (i, a) in ids.iter().enumerate() {
            for b in &ids[i + 1..] {
                let stacked = self.support_of(a) == Some(b.as_str()) || self.support_of(b) == Some(a.as_str());
                let (pa, pb) = (self.positions[*a], self.positions[*b]);
                if stacked {
                    if pa.distance(&pb) > self.alignment_tol {
                        out.push(format!("{a} and {b} are stacked but not concentric"));
                    }
                } else if self.layers[*a] == self.layers[*b] && pa.distance(&pb) < self.radii[*a] + self.radii[*b] {
                    out.push(format!("{a} overlaps {b}"));
                }
            }
        }
        for atom in &self.relations {
            if !relation_satisfied(atom, &self.positions, &self.layers, self.alignment_tol).unwrap_or(false) {
                out.push(format!("relation '{atom}' does not hold"));
            }
        }
        out
    }
}

struct Placement<'a> {
    relations: &'a RelationSet,
    radii: &'a BTreeMap<String, f64>,
    layers: &'a BTreeMap<String, u8>,
    table: Rect,
    tol: f64,
}

impl Placement<'_> {
    fn accepts(&self, id: &str, p: Point2, placed: &BTreeMap<String, Point2>, support: Option<&str>) -> bool {
        if !self.table.contains_disc(p, self.radii[id]) {
            return false;
        }
        let layer = self.layers[id];
        for (other, q) in placed {
            if Some(other.as_str()) == support || self.layers[other] != layer {
                continue;
            }
            if p.distance(q) < self.radii[id] + self.radii[other] {
                return false;
            }
        }
        let mut with = placed.clone();
        with.insert(id.to_string(), p);
        self.relations.iter().all(|a| {
            let involved = a.subject == id || a.reference_id() == Some(id);
            let ready = with.contains_key(&a.subject) && a.reference_id().map_or(true, |r| with.contains_key(r));
            !involved || !ready || relation_satisfied(a, &with, self.layers, self.tol).unwrap_or(false)
        })
    }
}

/// Draw one configuration. `Err` names the object whose attempts ran out.
fn sample_one(
    layout: &NominalLayout,
    place: &Placement<'_>,
    params: &SamplerParams,
    rng: &mut Rng,
) -> Result<BTreeMap<String, Point2>, String> {
    let normal = Normal::new(0.0, params.sigma).expect("positive sigma");
    let mut placed: BTreeMap<String, Point2> = BTreeMap::new();
    for id in &layout.order {
        let support = layout.support_of(id, place.relations.iter());
        if let Some(s) = &support {
            let p = placed[s];
            if !place.accepts(id, p, &placed, Some(s)) {
                return Err(id.clone());
            }
            placed.insert(id.clone(), p);
            continue;
        }
        let nominal = layout.positions[id];
        let mut ok = None;
        for _ in 0..params.max_attempts_per_object {
            let p = nominal.add(normal.sample(rng), normal.sample(rng));
            if place.accepts(id, p, &placed, None) {
                ok = Some(p);
                break;
            }
        }
        match ok {
            Some(p) => {
                placed.insert(id.clone(), p);
            }
            None => return Err(id.clone()),
        }
    }
    Ok(placed)
}

fn radii_for(objects: &[ObjectSpec], ids: &[String]) -> Result<BTreeMap<String, f64>, GroundingError> {
    ids.iter()
        .map(|id| {
            objects
                .iter()
                .find(|o| o.id == *id)
                .map(|o| (id.clone(), o.footprint_radius))
                .ok_or_else(|| GroundingError::UnknownObject(id.clone()))
        })
        .collect()
}

/// Up to `m` configurations, each from its own RNG stream. Objects are drawn
/// in layout order from a Gaussian around their nominal position and kept
/// only if relations with already placed objects hold, no same-layer disc
/// overlaps, and the disc stays on the table. Stacked objects take their
/// support's position.
pub fn sample_configurations(
    layout: &NominalLayout,
    relations: &RelationSet,
    table: &Obstacle,
    objects: &[ObjectSpec],
    params: &SamplerParams,
    seed: u64,
) -> Result<Vec<GoalConfiguration>, GroundingError> {
    params.validate()?;
    let radii = radii_for(objects, &layout.order)?;
    let place = Placement {
        relations,
        radii: &radii,
        layers: &layout.layers,
        table: Rect::new(0.0, 0.0, table.half_extents[0], table.half_extents[1]),
        tol: params.alignment_tol,
    };
    let mut out = Vec::new();
    let mut first_failure = None;
    for k in 0..params.m {
        let mut rng = rng::stream(seed, "grounding", k as u64);
        match sample_one(layout, &place, params, &mut rng) {
            Ok(positions) => out.push(GoalConfiguration {
                table_id: table.id.clone(),
                table_center: table.center.position(),
                table_half_extents: table.half_extents,
                positions,
                layers: layout.layers.clone(),
                radii: radii.clone(),
                order: layout.order.clone(),
                relations: relations.clone(),
                alignment_tol: params.alignment_tol,
                source: format!("llm:{k}"),
            }),
            Err(obj) => {
                first_failure.get_or_insert(obj);
            }
        }
    }
    if out.is_empty() {
        return Err(GroundingError::Exhausted(first_failure.unwrap_or_default()));
    }
    Ok(out)
}

/// Uniform collision-free placement on the table with no stacking, as used
/// by the baselines that ignore semantics. `relations` are kept for scoring.
pub fn random_configuration(
    ids: &[String],
    relations: &RelationSet,
    table: &Obstacle,
    objects: &[ObjectSpec],
    alignment_tol: f64,
    rng: &mut Rng,
) -> Result<GoalConfiguration, GroundingError> {
    let radii = radii_for(objects, ids)?;
    let (hx, hy) = (table.half_extents[0], table.half_extents[1]);
    let mut positions: BTreeMap<String, Point2> = BTreeMap::new();
    for id in ids {
        let r = radii[id];
        let mut ok = None;
        for _ in 0..10_000 {
            let p = Point2::new(rng.gen_range(-hx + r..=hx - r), rng.gen_range(-hy + r..=hy - r));
            if positions.iter().all(|(o, q)| p.distance(q) >= r + radii[o]) {
                ok = Some(p);
                break;
            }
        }
        positions.insert(id.clone(), ok.ok_or_else(|| GroundingError::Exhausted(id.clone()))?);
    }
    Ok(GoalConfiguration {
        table_id: table.id.clone(),
        table_center: table.center.position(),
        table_half_extents: table.half_extents,
        positions,
        layers: ids.iter().map(|i| (i.clone(), 0)).collect(),
        radii,
        order: ids.to_vec(),
        relations: relations.clone(),
        alignment_tol,
        source: "random".into(),
    })
}

/// Fraction of relations satisfied times the mean edge-margin factor, where an
/// object's margin factor is its clearance to the nearest table edge divided
/// by `MARGIN_SCALE`, capped at 1.
pub fn score_configuration(config: &GoalConfiguration) -> f64 {
    let atoms = config.relations.len();
    let sat = if atoms == 0 {
        1.0
    } else {
        config
            .relations
            .iter()
            .filter(|a| relation_satisfied(a, &config.positions, &config.layers, config.alignment_tol).unwrap_or(false))
            .count() as f64
            / atoms as f64
    };
    sat * margin_factor(config)
}

pub const MARGIN_SCALE: f64 = 0.1;

pub fn margin_factor(config: &GoalConfiguration) -> f64 {
    let (hx, hy) = (config.table_half_extents[0], config.table_half_extents[1]);
    let factors: Vec<f64> = config
        .positions
        .iter()
        .map(|(id, p)| {
            let m = (hx - p.x.abs() - config.radii[id]).min(hy - p.y.abs() - config.radii[id]).max(0.0);
            (m / MARGIN_SCALE).min(1.0)
        })
        .collect();
    if factors.is_empty() {
        1.0
    } else {
        factors.iter().sum::<f64>() / factors.len() as f64
    }
}

/// Indices sorted by descending score; ties keep their original order.
pub fn rank_configurations(configs: &[GoalConfiguration]) -> Vec<usize> {
    let scores: Vec<f64> = configs.iter().map(score_configuration).collect();
    let mut idx: Vec<usize> = (0..configs.len()).collect();
    idx.sort_by(|&a, &b| scores[b].total_cmp(&scores[a]));
    idx
}
