use super::heatmap::Heatmap;
use super::{FeasibilityError, FeasibilityParams};
use crate::geometry::Point2;
use crate::world::{rasterize, SceneState, Side};
use image::codecs::pnm::{PnmEncoder, PnmSubtype, SampleEncoding};
use image::{ExtendedColorType, GrayImage, ImageEncoder, RgbImage};
use serde::{Deserialize, Serialize};
use std::fs::File;
use std::io::BufWriter;
use std::path::Path;

/// Metadata written next to a heatmap image.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HeatmapSidecar {
    pub anchor: Point2,
    pub band: String,
    pub side: Side,
    pub cols: usize,
    pub rows: usize,
    pub cell_size: f64,
    pub trials_per_cell: u32,
    #[serde(with = "crate::rng::wide_seed")]
    pub seed: u64,
    pub params: FeasibilityParams,
    pub successes: Vec<u32>,
}

/// 8-bit image, one pixel per cell. Image row 0 is the band row farthest
/// from the table, so the table is at the bottom for every side.
pub fn heatmap_image(h: &Heatmap) -> GrayImage {
    let b = &h.band;
    GrayImage::from_fn(b.cols as u32, b.rows as u32, |x, y| {
        let row = b.rows - 1 - y as usize;
        image::Luma([(h.value(x as usize, row) * 255.0).round() as u8])
    })
}

fn io(e: impl std::fmt::Display) -> FeasibilityError {
    FeasibilityError::Io(e.to_string())
}

fn encode(path: &Path, bytes: &[u8], w: u32, h: u32, subtype: PnmSubtype, color: ExtendedColorType) -> Result<(), FeasibilityError> {
    let out = BufWriter::new(File::create(path).map_err(io)?);
    PnmEncoder::new(out).with_subtype(subtype).write_image(bytes, w, h, color).map_err(io)
}

/// Writes `<stem>.pgm` and `<stem>.toml`.
pub fn write_heatmap(h: &Heatmap, params: &FeasibilityParams, dir: &Path, stem: &str) -> Result<(), FeasibilityError> {
    std::fs::create_dir_all(dir).map_err(io)?;
    let img = heatmap_image(h);
    encode(
        &dir.join(format!("{stem}.pgm")),
        img.as_raw(),
        img.width(),
        img.height(),
        PnmSubtype::Graymap(SampleEncoding::Binary),
        ExtendedColorType::L8,
    )?;
    let side = HeatmapSidecar {
        anchor: h.anchor,
        band: h.band.id.clone(),
        side: h.band.side,
        cols: h.band.cols,
        rows: h.band.rows,
        cell_size: h.band.cell_size,
        trials_per_cell: h.trials_per_cell,
        seed: h.seed,
        params: params.clone(),
        successes: h.successes.clone(),
    };
    std::fs::write(dir.join(format!("{stem}.toml")), toml::to_string(&side).map_err(io)?).map_err(io)
}

/// Top-down sketch of the scene at grid resolution with heatmaps painted in
/// red over their bands and the unload points in blue. Image row 0 is north.
pub fn write_overlay(scene: &SceneState, heatmaps: &[&Heatmap], path: &Path) -> Result<(), FeasibilityError> {
    let g = rasterize(scene);
    let (w, hgt) = (g.width as u32, g.height as u32);
    let mut img = RgbImage::from_fn(w, hgt, |x, y| {
        let iy = g.height - 1 - y as usize;
        if g.occupied(x as usize, iy) {
            image::Rgb([60, 60, 60])
        } else {
            image::Rgb([235, 235, 235])
        }
    });
    for h in heatmaps {
        for iy in 0..g.height {
            for ix in 0..g.width {
                let c = g.cell_center(ix, iy);
                if let Some((col, row)) = h.band.cell_at(c) {
                    let v = h.value(col, row);
                    let shade = (235.0 * (1.0 - v)).round() as u8;
                    img.put_pixel(ix as u32, (g.height - 1 - iy) as u32, image::Rgb([235, shade, shade]));
                }
            }
        }
        if let Some((ix, iy)) = g.cell_of(h.anchor) {
            img.put_pixel(ix as u32, (g.height - 1 - iy) as u32, image::Rgb([0, 0, 255]));
        }
    }
    encode(path, img.as_raw(), w, hgt, PnmSubtype::Pixmap(SampleEncoding::Binary), ExtendedColorType::Rgb8)
}
