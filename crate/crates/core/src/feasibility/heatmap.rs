use super::trial::{run_trial, TrialRecord};
use super::{FeasibilityError, FeasibilityParams};
use crate::geometry::{Point2, Pose2D};
use crate::rng::{self, Rng};
use crate::world::{NavGrid, SceneState, SymbolicLocation};
use rand::distributions::{Distribution, WeightedIndex};
use rand::Rng as _;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// Per-cell success counts over one standing band for a fixed unload point.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Heatmap {
    /// Unload position in world coordinates.
    pub anchor: Point2,
    pub band: SymbolicLocation,
    pub trials_per_cell: u32,
    /// Row-major, `band.flat(col, row)`.
    pub successes: Vec<u32>,
    #[serde(with = "crate::rng::wide_seed")]
    pub seed: u64,
}

impl Heatmap {
    /// Heatmap from explicit per-cell values, rounded to `n` trials.
    pub fn from_values(anchor: Point2, band: SymbolicLocation, n: u32, values: &[f64]) -> Self {
        assert_eq!(values.len(), band.cell_count());
        let successes = values.iter().map(|v| (v.clamp(0.0, 1.0) * n as f64).round() as u32).collect();
        Self { anchor, band, trials_per_cell: n, successes, seed: 0 }
    }

    pub fn value(&self, col: usize, row: usize) -> f64 {
        self.value_at(self.band.flat(col, row))
    }

    pub fn value_at(&self, flat: usize) -> f64 {
        self.successes[flat] as f64 / self.trials_per_cell as f64
    }

    pub fn values(&self) -> Vec<f64> {
        (0..self.successes.len()).map(|i| self.value_at(i)).collect()
    }

    pub fn is_all_zero(&self) -> bool {
        self.successes.iter().all(|s| *s == 0)
    }
}

fn cell_trials(
    scene: &SceneState,
    nav: &NavGrid,
    y: Point2,
    band: &SymbolicLocation,
    params: &FeasibilityParams,
    seed: u64,
    flat: usize,
) -> Vec<bool> {
    let (col, row) = band.unflat(flat);
    let c = band.cell_center(col, row);
    let x = Pose2D::facing(c, y);
    let mut rng = rng::stream(seed, "heatmap", flat as u64);
    (0..params.trials_per_cell)
        .map(|_| run_trial(scene, nav, x, y, &band.table_id, params, &mut rng))
        .collect()
}

/// Heatmap plus every trial record, cells in row-major order.
pub fn generate_heatmap_records(
    scene: &SceneState,
    nav: &NavGrid,
    y: Point2,
    band: &SymbolicLocation,
    params: &FeasibilityParams,
    seed: u64,
) -> (Heatmap, Vec<TrialRecord>) {
    let per_cell: Vec<Vec<bool>> = (0..band.cell_count())
        .into_par_iter()
        .map(|i| cell_trials(scene, nav, y, band, params, seed, i))
        .collect();
    let mut records = Vec::with_capacity(per_cell.len() * params.trials_per_cell as usize);
    let mut successes = Vec::with_capacity(per_cell.len());
    for (i, outcomes) in per_cell.iter().enumerate() {
        let stand_cell = band.unflat(i);
        successes.push(outcomes.iter().filter(|r| **r).count() as u32);
        records.extend(outcomes.iter().map(|&success| TrialRecord { unload: y, stand_cell, success }));
    }
    let h = Heatmap { anchor: y, band: band.clone(), trials_per_cell: params.trials_per_cell, successes, seed };
    (h, records)
}

/// Runs `trials_per_cell` trials at each cell center, each cell on its own
/// RNG stream.
pub fn generate_heatmap(
    scene: &SceneState,
    nav: &NavGrid,
    y: Point2,
    band: &SymbolicLocation,
    params: &FeasibilityParams,
    seed: u64,
) -> Heatmap {
    generate_heatmap_records(scene, nav, y, band, params, seed).0
}

/// Heatmap value of the cell holding `x`.
pub fn fea_m(h: &Heatmap, x: Point2) -> Result<f64, FeasibilityError> {
    let (col, row) = h.band.cell_at(x).ok_or(FeasibilityError::OutOfRegion { x: x.x, y: x.y })?;
    Ok(h.value(col, row))
}

/// Standing pose drawn with probability proportional to cell value, uniform
/// when every cell is zero. Faces the unload point.
pub fn smp(band: &SymbolicLocation, h: &Heatmap, rng: &mut Rng) -> Pose2D {
    let flat = match WeightedIndex::new(&h.successes) {
        Ok(w) => w.sample(rng),
        Err(_) => rng.gen_range(0..band.cell_count()),
    };
    let (col, row) = band.unflat(flat);
    Pose2D::facing(band.cell_center(col, row), h.anchor)
}

/// Mean heatmap value over `n_smp` weighted standing-pose samples.
pub fn fea_t(h: &Heatmap, band: &SymbolicLocation, n_smp: usize, rng: &mut Rng) -> f64 {
    let total: f64 = (0..n_smp)
        .map(|_| fea_m(h, smp(band, h, rng).position()).expect("sampled cell lies in band"))
        .sum();
    total / n_smp as f64
}

/// Limit of `fea_t`: sum of h^2 over sum of h (0 for an all-zero map).
pub fn weighted_mean(h: &Heatmap) -> f64 {
    let v = h.values();
    let s: f64 = v.iter().sum();
    if s == 0.0 {
        0.0
    } else {
        v.iter().map(|x| x * x).sum::<f64>() / s
    }
}
