use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::{conn_with, dtssd, grad_with, mad, mse, Reduction};
use crate::error::{MatteError, Result};
use crate::exec::Execution;
use crate::image::{ensure_same, AlphaMatte, Mask};
use crate::trimap::Trimap;

/// Which pixels a report covers.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EvalRegion {
    #[default]
    Whole,
    TrimapUnknown,
}

#[derive(Clone, Copy, Debug, Default)]
pub struct EvalOptions<'a> {
    /// Restricts every metric to the trimap's unknown band.
    pub trimap: Option<&'a Trimap>,
    pub reduction: Reduction,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MetricReport {
    pub mad: f64,
    pub mse: f64,
    pub grad: f64,
    pub conn: f64,
    pub region: EvalRegion,
}

impl MetricReport {
    pub fn zero(region: EvalRegion) -> Self {
        Self {
            mad: 0.0,
            mse: 0.0,
            grad: 0.0,
            conn: 0.0,
            region,
        }
    }

    /// Field-wise arithmetic mean. `None` for an empty slice.
    pub fn mean(reports: &[MetricReport]) -> Option<MetricReport> {
        let first = reports.first()?;
        let n = reports.len() as f64;
        let sum = |f: fn(&MetricReport) -> f64| reports.iter().map(f).sum::<f64>() / n;
        Some(MetricReport {
            mad: sum(|r| r.mad),
            mse: sum(|r| r.mse),
            grad: sum(|r| r.grad),
            conn: sum(|r| r.conn),
            region: first.region,
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VideoMetricReport {
    pub frames: Vec<MetricReport>,
    pub mean: MetricReport,
    pub dtssd: f64,
}

fn region_mask(pred: &AlphaMatte, options: &EvalOptions<'_>) -> Result<(Option<Mask>, EvalRegion)> {
    match options.trimap {
        Some(t) => {
            ensure_same(pred.dims(), t.dims())?;
            Ok((Some(t.unknown()), EvalRegion::TrimapUnknown))
        }
        None => Ok((None, EvalRegion::Whole)),
    }
}

pub fn evaluate_pair(pred: &AlphaMatte, gt: &AlphaMatte, options: &EvalOptions<'_>) -> Result<MetricReport> {
    let (mask, region) = region_mask(pred, options)?;
    let mask = mask.as_ref();
    Ok(MetricReport {
        mad: mad(pred, gt, mask)?,
        mse: mse(pred, gt, mask)?,
        grad: grad_with(pred, gt, mask, options.reduction)?,
        conn: conn_with(pred, gt, mask, options.reduction)?,
        region,
    })
}

/// Per-frame reports plus dtSSD. `trimaps`, when given, must hold one trimap
/// per frame.
pub fn evaluate_sequence(
    pred: &[AlphaMatte],
    gt: &[AlphaMatte],
    trimaps: Option<&[Trimap]>,
    reduction: Reduction,
    exec: Execution,
) -> Result<VideoMetricReport> {
    let dtssd = dtssd(pred, gt)?;
    if let Some(t) = trimaps {
        if t.len() != gt.len() {
            return Err(MatteError::SequenceLength {
                pred: t.len(),
                gt: gt.len(),
            });
        }
    }
    let indices: Vec<usize> = (0..gt.len()).collect();
    let frames = exec
        .map(&indices, |&i| {
            let options = EvalOptions {
                trimap: trimaps.map(|t| &t[i]),
                reduction,
            };
            evaluate_pair(&pred[i], &gt[i], &options)
        })
        .into_iter()
        .collect::<Result<Vec<_>>>()?;
    let mean = MetricReport::mean(&frames).expect("at least two frames");
    Ok(VideoMetricReport { frames, mean, dtssd })
}

/// Aligned plain-text table with one row per entry. The dtSSD column appears
/// when any row carries a value.
pub fn format_table(rows: &[(String, MetricReport, Option<f64>)]) -> String {
    let with_dtssd = rows.iter().any(|r| r.2.is_some());
    let mut header = vec!["Sample", "MAD", "MSE", "Grad", "Conn"];
    if with_dtssd {
        header.push("dtSSD");
    }
    let body: Vec<Vec<String>> = rows
        .iter()
        .map(|(name, r, d)| {
            let mut cells = vec![
                name.clone(),
                format!("{:.4}", r.mad),
                format!("{:.4}", r.mse),
                format!("{:.4}", r.grad),
                format!("{:.4}", r.conn),
            ];
            if with_dtssd {
                cells.push(d.map_or_else(|| "-".to_string(), |v| format!("{v:.4}")));
            }
            cells
        })
        .collect();
    let widths: Vec<usize> = (0..header.len())
        .map(|c| body.iter().map(|r| r[c].len()).chain([header[c].len()]).max().unwrap_or(0))
        .collect();

    let mut out = String::new();
    let line = |cells: &[&str], out: &mut String| {
        let parts: Vec<String> = cells
            .iter()
            .enumerate()
            .map(|(c, s)| {
                if c == 0 {
                    format!("{s:<w$}", w = widths[c])
                } else {
                    format!("{s:>w$}", w = widths[c])
                }
            })
            .collect();
        let _ = writeln!(out, "{}", parts.join("  ").trim_end());
    };
    line(&header, &mut out);
    let rule: Vec<String> = widths.iter().map(|&w| "-".repeat(w)).collect();
    let _ = writeln!(out, "{}", rule.join("  "));
    for row in &body {
        let cells: Vec<&str> = row.iter().map(String::as_str).collect();
        line(&cells, &mut out);
    }
    out
}
