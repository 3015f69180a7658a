use mattekit_core::connectivity::refine_detailed;
use mattekit_core::io::{read_alpha, write_alpha, write_label_map};

use crate::error::{PipelineError, Result};
use crate::layout::{ensure_dir, fan_out, label_map_files, sample_file, LABEL_DIR, REFINED_DIR};
use crate::manifest::{timestamp, DecidedBy, Manifest, ManifestStore, Status};

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct RefineSummary {
    pub refined: usize,
    pub failed: usize,
}

/// Refines every accepted sample and writes `refined/<id>.png`. Failures are
/// stored on the record, which stays accepted. With `label_maps`, the
/// background, kept semi-transparent and foreground region labels are also
/// written as 16-bit images under `labels/` for debugging.
pub fn refine_batch(
    store: &ManifestStore,
    manifest: &mut Manifest,
    workers: usize,
    label_maps: bool,
) -> Result<RefineSummary> {
    let todo: Vec<(String, String)> = manifest
        .with_status(Status::Accepted)
        .map(|s| (s.id.clone(), s.paths.alpha.clone()))
        .collect();
    if todo.is_empty() {
        return Ok(RefineSummary::default());
    }
    ensure_dir(store.root(), REFINED_DIR)?;
    if label_maps {
        ensure_dir(store.root(), LABEL_DIR)?;
    }
    let results = fan_out(workers, &todo, |(id, alpha)| -> Result<String> {
        let input = store.resolve(alpha);
        let matte = read_alpha(&input).map_err(|e| PipelineError::image(&input, e))?;
        let pass = refine_detailed(&matte).map_err(|e| PipelineError::image(&input, e))?;
        let rel = sample_file(REFINED_DIR, id);
        let out = store.resolve(&rel);
        write_alpha(&out, &pass.refined).map_err(|e| PipelineError::image(&out, e))?;
        if label_maps {
            for (file, regions) in label_map_files(id).iter().zip([&pass.background, &pass.semi, &pass.foreground]) {
                let out = store.resolve(file);
                write_label_map(&out, regions).map_err(|e| PipelineError::image(&out, e))?;
            }
        }
        Ok(rel)
    });

    let now = timestamp();
    let mut summary = RefineSummary::default();
    for ((id, _), result) in todo.iter().zip(results) {
        let record = manifest.sample_mut(id).expect("id taken from the manifest");
        match result {
            Ok(rel) => {
                record.paths.refined = Some(rel);
                record.error = None;
                record.transition(Status::Refined, DecidedBy::Auto, &now)?;
                summary.refined += 1;
            }
            Err(e) => {
                record.error = Some(e.to_string());
                record.updated_at = now.clone();
                summary.failed += 1;
            }
        }
    }
    Ok(summary)
}
