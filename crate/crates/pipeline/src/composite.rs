//! Compositing refined samples over natural backgrounds.
//!
//! Each refined sample (in id order) draws `per_sample` backgrounds from a
//! seeded shuffle of the background directory; when more are requested than
//! exist, further shuffles are appended. Backgrounds are scaled to cover the
//! sample and center-cropped, so their aspect ratio is preserved.

use std::path::{Path, PathBuf};

use image::imageops::{self, FilterType};
use image::{ImageBuffer, Rgb};
use mattekit_core::io::{read_alpha, read_rgb, write_rgb};
use mattekit_core::matte::composite;
use mattekit_core::RgbImage;

use crate::error::{PipelineError, Result};
use crate::layout::{composite_file, ensure_dir, fan_out, png_files, COMPOSITE_DIR};
use crate::manifest::{timestamp, Composite, Manifest, ManifestStore, Status};
use crate::rng::PipelineRng;

/// Scales `bg` so it covers `width`×`height`, then crops the center.
pub fn fit_background(bg: &RgbImage, width: usize, height: usize) -> RgbImage {
    let (bw, bh) = bg.dims();
    let scale = f64::max(width as f64 / bw as f64, height as f64 / bh as f64);
    let nw = ((bw as f64 * scale).round() as usize).max(width);
    let nh = ((bh as f64 * scale).round() as usize).max(height);
    let resized: Vec<[u8; 3]> = if (nw, nh) == (bw, bh) {
        bg.pixels().to_vec()
    } else {
        let buf: ImageBuffer<Rgb<u8>, Vec<u8>> =
            ImageBuffer::from_raw(bw as u32, bh as u32, bg.to_interleaved()).expect("buffer matches dimensions");
        let out = imageops::resize(&buf, nw as u32, nh as u32, FilterType::Triangle);
        out.pixels().map(|p| p.0).collect()
    };
    let (x0, y0) = ((nw - width) / 2, (nh - height) / 2);
    RgbImage::from_fn(width, height, |r, c| resized[(r + y0) * nw + c + x0]).expect("non-empty sample")
}

/// Background index sequence for one sample.
fn draw(rng: &mut PipelineRng, available: usize, count: usize) -> Vec<usize> {
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let mut order: Vec<usize> = (0..available).collect();
        rng.shuffle(&mut order);
        out.extend(order.into_iter().take(count - out.len()));
    }
    out
}

struct Job {
    id: String,
    rgb: String,
    refined: String,
    backgrounds: Vec<usize>,
}

pub fn composite_batch(
    store: &ManifestStore,
    manifest: &mut Manifest,
    backgrounds_dir: &Path,
    per_sample: usize,
    seed: u64,
    workers: usize,
) -> Result<usize> {
    let bg_paths: Vec<PathBuf> = png_files(backgrounds_dir)?;
    if bg_paths.is_empty() {
        return Err(PipelineError::NoBackgrounds(backgrounds_dir.to_path_buf()));
    }
    let mut rng = PipelineRng::new(seed);
    let jobs: Vec<Job> = manifest
        .with_status(Status::Refined)
        .filter_map(|s| {
            Some(Job {
                id: s.id.clone(),
                rgb: s.paths.rgb.clone(),
                refined: s.paths.refined.clone()?,
                backgrounds: Vec::new(),
            })
        })
        .collect::<Vec<_>>()
        .into_iter()
        .map(|mut job| {
            job.backgrounds = draw(&mut rng, bg_paths.len(), per_sample);
            job
        })
        .collect();
    if per_sample == 0 || jobs.is_empty() {
        return Ok(0);
    }

    let backgrounds: Vec<RgbImage> = fan_out(workers, &bg_paths, |p| read_rgb(p).map_err(|e| PipelineError::image(p, e)))
        .into_iter()
        .collect::<Result<_>>()?;
    ensure_dir(store.root(), COMPOSITE_DIR)?;

    let results = fan_out(workers, &jobs, |job| -> Result<Vec<Composite>> {
        let rgb_path = store.resolve(&job.rgb);
        let fg = read_rgb(&rgb_path).map_err(|e| PipelineError::image(&rgb_path, e))?;
        let alpha_path = store.resolve(&job.refined);
        let alpha = read_alpha(&alpha_path).map_err(|e| PipelineError::image(&alpha_path, e))?;
        let (w, h) = alpha.dims();
        job.backgrounds
            .iter()
            .enumerate()
            .map(|(k, &b)| {
                let bg = fit_background(&backgrounds[b], w, h);
                let image = composite(&fg, &alpha, &bg).map_err(|e| PipelineError::image(&alpha_path, e))?;
                let rel = composite_file(&job.id, k);
                let out = store.resolve(&rel);
                write_rgb(&out, &image).map_err(|e| PipelineError::image(&out, e))?;
                let name = bg_paths[b].file_name().unwrap_or_default().to_string_lossy().into_owned();
                Ok(Composite { path: rel, background: name })
            })
            .collect()
    });

    let now = timestamp();
    let mut written = 0;
    for (job, result) in jobs.iter().zip(results) {
        let composites = result?;
        written += composites.len();
        let record = manifest.sample_mut(&job.id).expect("id taken from the manifest");
        record.paths.composites = composites;
        record.updated_at = now.clone();
    }
    Ok(written)
}
