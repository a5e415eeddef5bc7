use super::heatmap::{generate_heatmap, Heatmap};
use super::FeasibilityParams;
use crate::geometry::Point2;
use crate::world::{NavGrid, SceneState, SymbolicLocation};
use sha2::{Digest, Sha256};
use std::collections::HashMap;
use std::path::{Path, PathBuf};
use std::sync::{Arc, Mutex, OnceLock};

/// Identity of a heatmap: scene content, unload point (quantized to 0.1 mm),
/// band, trial parameters and seed.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct HeatmapKey {
    pub scene_hash: String,
    pub y_um: (i64, i64),
    pub band: String,
    pub params: String,
    pub seed: u64,
}

impl HeatmapKey {
    pub fn new(scene_hash: &str, y: Point2, band: &SymbolicLocation, params: &FeasibilityParams, seed: u64) -> Self {
        Self {
            scene_hash: scene_hash.to_string(),
            y_um: ((y.x * 1e4).round() as i64, (y.y * 1e4).round() as i64),
            band: band.id.clone(),
            params: format!(
                "{}/{}/{}/{}",
                params.trials_per_cell, params.nav_noise_sigma_xy, params.nav_noise_sigma_theta, params.reach_radius
            ),
            seed,
        }
    }

    pub fn file_stem(&self) -> String {
        let text = format!("{}|{:?}|{}|{}|{}", self.scene_hash, self.y_um, self.band, self.params, self.seed);
        hex::encode(&Sha256::digest(text.as_bytes())[..16])
    }
}

type Slot = Arc<OnceLock<Arc<Heatmap>>>;

/// Memory cache with an optional directory behind it. Each key is computed
/// once; concurrent callers for the same key wait on that computation.
#[derive(Default)]
pub struct HeatmapCache {
    dir: Option<PathBuf>,
    slots: Mutex<HashMap<HeatmapKey, Slot>>,
}

impl HeatmapCache {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_dir(dir: &Path) -> Self {
        Self { dir: Some(dir.to_path_buf()), slots: Mutex::default() }
    }

    pub fn len(&self) -> usize {
        self.slots.lock().expect("cache lock").values().filter(|s| s.get().is_some()).count()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn path(&self, key: &HeatmapKey) -> Option<PathBuf> {
        self.dir.as_ref().map(|d| d.join(format!("{}.heatmap.toml", key.file_stem())))
    }

    fn load(&self, key: &HeatmapKey) -> Option<Heatmap> {
        let text = std::fs::read_to_string(self.path(key)?).ok()?;
        toml::from_str(&text).ok()
    }

    fn store(&self, key: &HeatmapKey, h: &Heatmap) {
        let Some(path) = self.path(key) else { return };
        let tmp = path.with_extension(format!("tmp{}", std::process::id()));
        let text = toml::to_string(h).expect("heatmap serializes");
        let written = std::fs::create_dir_all(path.parent().expect("cache file has a parent"))
            .and_then(|_| std::fs::write(&tmp, text))
            .and_then(|_| std::fs::rename(&tmp, &path));
        if let Err(e) = written {
            log::warn!("heatmap cache write failed for {}: {e}", path.display());
        }
    }

    pub fn get_or_compute(
        &self,
        scene: &SceneState,
        scene_hash: &str,
        nav: &NavGrid,
        y: Point2,
        band: &SymbolicLocation,
        params: &FeasibilityParams,
        seed: u64,
    ) -> Arc<Heatmap> {
        let key = HeatmapKey::new(scene_hash, y, band, params, seed);
        let slot = self.slots.lock().expect("cache lock").entry(key.clone()).or_default().clone();
        slot.get_or_init(|| {
            if let Some(h) = self.load(&key) {
                return Arc::new(h);
            }
            let h = generate_heatmap(scene, nav, y, band, params, seed);
            self.store(&key, &h);
            Arc::new(h)
        })
        .clone()
    }
}
