//! Ingestion of generated RGB/alpha pairs into the manifest.
//!
//! A directory may hold `<id>_rgb.png` with `<id>_alpha.png`, or a single
//! RGBA `<id>.png`. Each sample's colour, alpha and inverse alpha are copied
//! into the manifest directory, screening statistics are computed, and the
//! automatic screen marks suspicious samples as flagged. Problems with one
//! sample are recorded as issues and never stop the batch.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use mattekit_core::connectivity::{auto_screen, screening_stats, ScreenVerdict, ScreeningStats, ScreeningThresholds};
use mattekit_core::io::{read_alpha, read_png, read_rgb, write_alpha, write_inverse, write_rgb, PngImage};
use mattekit_core::matte::invert_alpha;
use mattekit_core::{AlphaMatte, RgbImage};

use crate::error::{PipelineError, Result};
use crate::layout::{self, fan_out, png_files, sample_file, valid_id, ALPHA_DIR, INVERSE_DIR, RGB_DIR};
use crate::manifest::{timestamp, DecidedBy, Issue, Manifest, ManifestStore, SamplePaths, SampleRecord, Status};

pub const STAGE: &str = "ingest";

#[derive(Clone, Debug, PartialEq, Eq)]
enum Source {
    Pair { rgb: PathBuf, alpha: PathBuf },
    Rgba(PathBuf),
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct IngestSummary {
    pub added: usize,
    pub flagged: usize,
    pub skipped: usize,
    pub issues: usize,
}

fn issue(id: &str, message: impl Into<String>) -> Issue {
    Issue {
        stage: STAGE.into(),
        id: id.into(),
        message: message.into(),
    }
}

/// Groups the directory's PNG files into samples by naming convention.
fn discover(dir: &Path) -> Result<(BTreeMap<String, Source>, Vec<Issue>)> {
    #[derive(Default)]
    struct Parts {
        rgb: Option<PathBuf>,
        alpha: Option<PathBuf>,
        single: Option<PathBuf>,
    }
    let mut parts: BTreeMap<String, Parts> = BTreeMap::new();
    for path in png_files(dir)? {
        let stem = path.file_stem().and_then(|s| s.to_str()).unwrap_or_default().to_string();
        if let Some(id) = stem.strip_suffix("_rgb") {
            parts.entry(id.to_string()).or_default().rgb = Some(path);
        } else if let Some(id) = stem.strip_suffix("_alpha") {
            parts.entry(id.to_string()).or_default().alpha = Some(path);
        } else {
            parts.entry(stem).or_default().single = Some(path);
        }
    }

    let mut sources = BTreeMap::new();
    let mut issues = Vec::new();
    for (id, p) in parts {
        if !valid_id(&id) {
            issues.push(issue(&id, "sample id contains unsupported characters"));
            continue;
        }
        match (p.rgb, p.alpha, p.single) {
            (Some(rgb), Some(alpha), None) => {
                sources.insert(id, Source::Pair { rgb, alpha });
            }
            (None, None, Some(single)) => {
                sources.insert(id, Source::Rgba(single));
            }
            (Some(_), None, None) => issues.push(issue(&id, "unpaired file: missing <id>_alpha.png")),
            (None, Some(_), None) => issues.push(issue(&id, "unpaired file: missing <id>_rgb.png")),
            _ => issues.push(issue(&id, "ambiguous: both <id>.png and an <id>_rgb/_alpha pair")),
        }
    }
    Ok((sources, issues))
}

fn load(source: &Source) -> Result<(RgbImage, AlphaMatte)> {
    match source {
        Source::Pair { rgb, alpha } => {
            let color = read_rgb(rgb).map_err(|e| PipelineError::image(rgb, e))?;
            let matte = read_alpha(alpha).map_err(|e| PipelineError::image(alpha, e))?;
            if color.dims() != matte.dims() {
                return Err(PipelineError::image(
                    alpha,
                    mattekit_core::MatteError::Dimension {
                        expected: color.dims(),
                        found: matte.dims(),
                    },
                ));
            }
            Ok((color, matte))
        }
        Source::Rgba(path) => match read_png(path).map_err(|e| PipelineError::image(path, e))? {
            PngImage::Rgba(color, matte) => Ok((color, matte)),
            _ => Err(PipelineError::image(
                path,
                mattekit_core::MatteError::Format("single-file samples must be RGBA".into()),
            )),
        },
    }
}

struct Loaded {
    paths: SamplePaths,
    dims: (usize, usize),
    stats: ScreeningStats,
}

fn process(root: &Path, id: &str, source: &Source) -> Result<Loaded> {
    let (color, matte) = load(source)?;
    let paths = SamplePaths {
        rgb: sample_file(RGB_DIR, id),
        alpha: sample_file(ALPHA_DIR, id),
        inverse: sample_file(INVERSE_DIR, id),
        ..Default::default()
    };
    let out = |rel: &str| root.join(rel);
    write_rgb(out(&paths.rgb), &color).map_err(|e| PipelineError::image(out(&paths.rgb), e))?;
    write_alpha(out(&paths.alpha), &matte).map_err(|e| PipelineError::image(out(&paths.alpha), e))?;
    write_inverse(out(&paths.inverse), &invert_alpha(&matte))
        .map_err(|e| PipelineError::image(out(&paths.inverse), e))?;
    Ok(Loaded {
        paths,
        dims: matte.dims(),
        stats: screening_stats(&matte),
    })
}

pub fn ingest(
    store: &ManifestStore,
    manifest: &mut Manifest,
    dir: &Path,
    thresholds: &ScreeningThresholds,
    workers: usize,
) -> Result<IngestSummary> {
    let (sources, mut issues) = discover(dir)?;
    let mut summary = IngestSummary::default();
    let todo: Vec<(String, Source)> = sources
        .into_iter()
        .filter(|(id, _)| {
            let known = manifest.sample(id).is_some();
            summary.skipped += usize::from(known);
            !known
        })
        .collect();
    if !todo.is_empty() {
        for dir in [RGB_DIR, ALPHA_DIR, INVERSE_DIR] {
            layout::ensure_dir(store.root(), dir)?;
        }
    }

    let root = store.root();
    let results = fan_out(workers, &todo, |(id, source)| process(root, id, source));
    let now = timestamp();
    for ((id, _), result) in todo.iter().zip(results) {
        match result {
            Ok(loaded) => {
                let mut record = SampleRecord {
                    id: id.clone(),
                    width: loaded.dims.0,
                    height: loaded.dims.1,
                    paths: loaded.paths,
                    status: Status::Pending,
                    screening: loaded.stats,
                    metrics: None,
                    chroma: None,
                    decided_by: None,
                    error: None,
                    created_at: now.clone(),
                    updated_at: now.clone(),
                };
                if auto_screen(&record.screening, thresholds) == ScreenVerdict::Flag {
                    record.transition(Status::Flagged, DecidedBy::Auto, &now)?;
                    summary.flagged += 1;
                }
                manifest.insert(record);
                summary.added += 1;
            }
            Err(e) => issues.push(issue(id, e.to_string())),
        }
    }
    summary.issues = issues.len();
    manifest.set_issues(STAGE, issues);
    Ok(summary)
}
