use super::DTSSD_SCALE;
use crate::error::{MatteError, Result};
use crate::image::{ensure_same, AlphaMatte};

/// Temporal-derivative error: the RMS difference between predicted and true
/// frame-to-frame alpha changes, averaged over transitions, ×10².
pub fn dtssd(pred: &[AlphaMatte], gt: &[AlphaMatte]) -> Result<f64> {
    if pred.len() != gt.len() {
        return Err(MatteError::SequenceLength {
            pred: pred.len(),
            gt: gt.len(),
        });
    }
    if gt.len() < 2 {
        return Err(MatteError::TooFewFrames(gt.len()));
    }
    let dims = gt[0].dims();
    for frame in pred.iter().chain(gt) {
        ensure_same(dims, frame.dims())?;
    }
    let n = gt[0].len() as f64;
    let mut total = 0.0;
    for t in 1..gt.len() {
        let sum: f64 = (0..gt[t].len())
            .map(|i| {
                let dp = f64::from(pred[t].as_slice()[i]) - f64::from(pred[t - 1].as_slice()[i]);
                let dg = f64::from(gt[t].as_slice()[i]) - f64::from(gt[t - 1].as_slice()[i]);
                let e = (dp - dg) / 255.0;
                e * e
            })
            .sum();
        total += (sum / n).sqrt();
    }
    Ok(total / (gt.len() - 1) as f64 * DTSSD_SCALE)
}
