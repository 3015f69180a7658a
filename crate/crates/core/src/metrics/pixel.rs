use super::{prepare, selected, MAD_SCALE, MSE_SCALE};
use crate::error::Result;
use crate::image::{AlphaMatte, Mask};

fn mean_of(
    pred: &AlphaMatte,
    gt: &AlphaMatte,
    region: Option<&Mask>,
    f: impl Fn(f64) -> f64,
) -> Result<f64> {
    let count = prepare(pred, gt, region)?;
    let sum: f64 = pred
        .as_slice()
        .iter()
        .zip(gt.as_slice())
        .enumerate()
        .filter(|(i, _)| selected(region, *i))
        .map(|(_, (&p, &g))| f((f64::from(p) - f64::from(g)) / 255.0))
        .sum();
    Ok(sum / count as f64)
}

/// Mean absolute difference, ×10³.
pub fn mad(pred: &AlphaMatte, gt: &AlphaMatte, region: Option<&Mask>) -> Result<f64> {
    Ok(mean_of(pred, gt, region, f64::abs)? * MAD_SCALE)
}

/// Mean squared error, ×10³.
pub fn mse(pred: &AlphaMatte, gt: &AlphaMatte, region: Option<&Mask>) -> Result<f64> {
    Ok(mean_of(pred, gt, region, |d| d * d)? * MSE_SCALE)
}
