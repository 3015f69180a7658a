//! Re-extraction from solid key-colour composites.
//!
//! Each refined sample is composited over the key colour, then alpha and
//! foreground are recovered by chroma keying. The record keeps the largest
//! per-channel reconstruction error, MAD between the recovered and refined
//! alpha, and the full metric report when it is defined.

use mattekit_core::io::{read_alpha, read_rgb, write_alpha, write_rgb};
use mattekit_core::matte::{composite, max_channel_error, solid_background, ChromaKeyer};
use mattekit_core::metrics::{evaluate_pair, mad, EvalOptions};
use mattekit_core::KeyColor;

use crate::error::{PipelineError, Result};
use crate::layout::{chroma_files, ensure_dir, fan_out, CHROMA_DIR};
use crate::manifest::{timestamp, ChromaResult, Manifest, ManifestStore, Status};

struct Extracted {
    alpha: String,
    foreground: String,
    result: ChromaResult,
    metrics: Option<mattekit_core::metrics::MetricReport>,
}

pub fn chroma_batch(
    store: &ManifestStore,
    manifest: &mut Manifest,
    keyer: ChromaKeyer,
    workers: usize,
) -> Result<usize> {
    let todo: Vec<(String, String, String)> = manifest
        .with_status(Status::Refined)
        .filter_map(|s| Some((s.id.clone(), s.paths.rgb.clone(), s.paths.refined.clone()?)))
        .collect();
    if todo.is_empty() {
        return Ok(0);
    }
    ensure_dir(store.root(), CHROMA_DIR)?;
    let key: KeyColor = keyer.key;
    let results = fan_out(workers, &todo, |(id, rgb, refined)| -> Result<Extracted> {
        let rgb_path = store.resolve(rgb);
        let fg = read_rgb(&rgb_path).map_err(|e| PipelineError::image(&rgb_path, e))?;
        let alpha_path = store.resolve(refined);
        let alpha = read_alpha(&alpha_path).map_err(|e| PipelineError::image(&alpha_path, e))?;
        let (w, h) = alpha.dims();
        let backdrop = solid_background(key, w, h)?;
        let keyed = composite(&fg, &alpha, &backdrop)?;
        let (alpha2, fg2) = keyer.extract(&keyed);
        let rebuilt = composite(&fg2, &alpha2, &backdrop)?;

        let (alpha_rel, fg_rel) = chroma_files(id);
        let out = store.resolve(&alpha_rel);
        write_alpha(&out, &alpha2).map_err(|e| PipelineError::image(&out, e))?;
        let out = store.resolve(&fg_rel);
        write_rgb(&out, &fg2).map_err(|e| PipelineError::image(&out, e))?;
        Ok(Extracted {
            alpha: alpha_rel,
            foreground: fg_rel,
            result: ChromaResult {
                key: key.to_string(),
                round_trip_max_error: max_channel_error(&rebuilt, &keyed)?,
                mad: mad(&alpha2, &alpha, None)?,
            },
            metrics: evaluate_pair(&alpha2, &alpha, &EvalOptions::default()).ok(),
        })
    });

    let now = timestamp();
    let mut done = 0;
    for ((id, _, _), result) in todo.iter().zip(results) {
        let e = result?;
        let record = manifest.sample_mut(id).expect("id taken from the manifest");
        record.paths.chroma_alpha = Some(e.alpha);
        record.paths.chroma_foreground = Some(e.foreground);
        record.chroma = Some(e.result);
        record.metrics = e.metrics;
        record.updated_at = now.clone();
        done += 1;
    }
    Ok(done)
}
