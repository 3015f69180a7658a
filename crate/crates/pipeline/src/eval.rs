//! Directory-to-directory evaluation.
//!
//! Predictions and ground truths are paired by file stem. Stems present on
//! one side only are listed and skipped; pairs that fail to load or evaluate
//! are reported as errors while the rest of the batch continues.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use mattekit_core::io::{read_alpha, read_trimap};
use mattekit_core::metrics::{dtssd, evaluate_pair, format_table, EvalOptions, MetricReport, Reduction};
use mattekit_core::trimap::{default_band, trimap_from_alpha, Trimap};
use mattekit_core::AlphaMatte;
use serde::{Deserialize, Serialize};

use crate::error::{PipelineError, Result};
use crate::layout::{fan_out, png_files};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum MaskMode {
    /// Every pixel counts.
    #[default]
    None,
    /// Only the unknown band of a trimap counts.
    Trimap,
}

#[derive(Clone, Debug, Default)]
pub struct EvalSettings {
    pub mask: MaskMode,
    /// Trimaps named `<stem>.png`; generated from ground truth when absent.
    pub trimap_dir: Option<PathBuf>,
    pub band: Option<usize>,
    pub reduction: Reduction,
    /// Treat the stem-sorted pairs as consecutive video frames and add dtSSD.
    pub sequence: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SampleEval {
    pub id: String,
    pub report: MetricReport,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Unpaired {
    pub id: String,
    /// Which side lacks the file: `pred` or `gt`.
    pub missing: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EvalError {
    pub id: String,
    pub message: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub mask: MaskMode,
    pub reduction: Reduction,
    pub samples: Vec<SampleEval>,
    pub mean: Option<MetricReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dtssd: Option<f64>,
    pub unpaired: Vec<Unpaired>,
    pub errors: Vec<EvalError>,
}

impl EvalReport {
    pub fn table(&self) -> String {
        let mut rows: Vec<(String, MetricReport, Option<f64>)> =
            self.samples.iter().map(|s| (s.id.clone(), s.report, None)).collect();
        if let Some(mean) = self.mean {
            rows.push(("mean".into(), mean, self.dtssd));
        }
        format_table(&rows)
    }
}

fn stems(dir: &Path) -> Result<BTreeMap<String, PathBuf>> {
    Ok(png_files(dir)?
        .into_iter()
        .filter_map(|p| Some((p.file_stem()?.to_str()?.to_string(), p)))
        .collect())
}

fn load_pair(pred: &Path, gt: &Path) -> Result<(AlphaMatte, AlphaMatte)> {
    let p = read_alpha(pred).map_err(|e| PipelineError::image(pred, e))?;
    let g = read_alpha(gt).map_err(|e| PipelineError::image(gt, e))?;
    Ok((p, g))
}

fn trimap_for(id: &str, gt: &AlphaMatte, settings: &EvalSettings) -> Result<Option<Trimap>> {
    if settings.mask == MaskMode::None {
        return Ok(None);
    }
    match &settings.trimap_dir {
        Some(dir) => {
            let path = dir.join(format!("{id}.png"));
            read_trimap(&path).map(Some).map_err(|e| PipelineError::image(path, e))
        }
        None => {
            let (w, h) = gt.dims();
            let band = settings.band.unwrap_or_else(|| default_band(w, h));
            Ok(Some(trimap_from_alpha(gt, band, band)))
        }
    }
}

pub fn evaluate_dirs(pred_dir: &Path, gt_dir: &Path, settings: &EvalSettings, workers: usize) -> Result<EvalReport> {
    let preds = stems(pred_dir)?;
    let gts = stems(gt_dir)?;
    let mut unpaired = Vec::new();
    for id in preds.keys().filter(|k| !gts.contains_key(*k)) {
        unpaired.push(Unpaired {
            id: id.clone(),
            missing: "gt".into(),
        });
    }
    for id in gts.keys().filter(|k| !preds.contains_key(*k)) {
        unpaired.push(Unpaired {
            id: id.clone(),
            missing: "pred".into(),
        });
    }
    unpaired.sort_by(|a, b| a.id.cmp(&b.id));

    let pairs: Vec<(String, PathBuf, PathBuf)> = preds
        .iter()
        .filter_map(|(id, p)| Some((id.clone(), p.clone(), gts.get(id)?.clone())))
        .collect();
    type Frames = Option<(AlphaMatte, AlphaMatte)>;
    let results = fan_out(workers, &pairs, |(id, p, g)| -> Result<(MetricReport, Frames)> {
        let (pred, gt) = load_pair(p, g)?;
        let trimap = trimap_for(id, &gt, settings)?;
        let options = EvalOptions {
            trimap: trimap.as_ref(),
            reduction: settings.reduction,
        };
        let report = evaluate_pair(&pred, &gt, &options).map_err(|e| PipelineError::image(p, e))?;
        Ok((report, settings.sequence.then_some((pred, gt))))
    });

    let mut samples = Vec::new();
    let mut errors = Vec::new();
    let mut frames = (Vec::new(), Vec::new());
    for ((id, _, _), result) in pairs.iter().zip(results) {
        match result {
            Ok((report, pair)) => {
                samples.push(SampleEval { id: id.clone(), report });
                if let Some((pred, gt)) = pair {
                    frames.0.push(pred);
                    frames.1.push(gt);
                }
            }
            Err(e) => errors.push(EvalError {
                id: id.clone(),
                message: e.to_string(),
            }),
        }
    }
    let reports: Vec<MetricReport> = samples.iter().map(|s| s.report).collect();
    let dtssd = if settings.sequence {
        match dtssd(&frames.0, &frames.1) {
            Ok(v) => Some(v),
            Err(e) => {
                errors.push(EvalError {
                    id: "sequence".into(),
                    message: e.to_string(),
                });
                None
            }
        }
    } else {
        None
    };
    Ok(EvalReport {
        mask: settings.mask,
        reduction: settings.reduction,
        mean: MetricReport::mean(&reports),
        samples,
        dtssd,
        unpaired,
        errors,
    })
}
