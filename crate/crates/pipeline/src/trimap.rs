use mattekit_core::io::{read_alpha, write_trimap};
use mattekit_core::trimap::{default_band, trimap_from_alpha};

use crate::error::{PipelineError, Result};
use crate::layout::{ensure_dir, fan_out, sample_file, TRIMAP_DIR};
use crate::manifest::{Manifest, ManifestStore, Status};

/// Writes `trimap/<id>.png` for every refined sample, eroding both the
/// opaque and the transparent region by `band` pixels (or a size-derived
/// default). Returns the number of trimaps written.
pub fn trimap_batch(
    store: &ManifestStore,
    manifest: &mut Manifest,
    band: Option<usize>,
    workers: usize,
) -> Result<usize> {
    let todo: Vec<(String, String)> = manifest
        .with_status(Status::Refined)
        .filter_map(|s| Some((s.id.clone(), s.paths.refined.clone()?)))
        .collect();
    if todo.is_empty() {
        return Ok(0);
    }
    ensure_dir(store.root(), TRIMAP_DIR)?;
    let results = fan_out(workers, &todo, |(id, refined)| -> Result<String> {
        let input = store.resolve(refined);
        let alpha = read_alpha(&input).map_err(|e| PipelineError::image(&input, e))?;
        let (w, h) = alpha.dims();
        let band = band.unwrap_or_else(|| default_band(w, h));
        let trimap = trimap_from_alpha(&alpha, band, band);
        let rel = sample_file(TRIMAP_DIR, id);
        let out = store.resolve(&rel);
        write_trimap(&out, &trimap).map_err(|e| PipelineError::image(&out, e))?;
        Ok(rel)
    });
    let mut written = 0;
    for ((id, _), result) in todo.iter().zip(results) {
        let rel = result?;
        manifest.sample_mut(id).expect("id taken from the manifest").paths.trimap = Some(rel);
        written += 1;
    }
    Ok(written)
}
