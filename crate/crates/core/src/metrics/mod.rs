//! Matting quality metrics.
//!
//! Alphas are normalized to `[0, 1]` and all arithmetic is double precision.
//! Reported values carry fixed scale factors: MAD and MSE ×10³, Grad and Conn
//! ×10⁻³, dtSSD ×10².

mod conn;
mod gradient;
mod pixel;
mod report;
mod temporal;

pub use conn::{conn, conn_with, CONN_DELTA, CONN_STEPS};
pub use gradient::{gaussian_derivative_kernels, grad, grad_with, gradient_magnitude, GRAD_SIGMA};
pub use pixel::{mad, mse};
pub use report::{
    evaluate_pair, evaluate_sequence, format_table, EvalOptions, EvalRegion, MetricReport, VideoMetricReport,
};
pub use temporal::dtssd;

use serde::{Deserialize, Serialize};

use crate::error::{MatteError, Result};
use crate::image::{ensure_same, AlphaMatte, Mask};

pub const MAD_SCALE: f64 = 1e3;
pub const MSE_SCALE: f64 = 1e3;
pub const GRAD_SCALE: f64 = 1e-3;
pub const CONN_SCALE: f64 = 1e-3;
pub const DTSSD_SCALE: f64 = 1e2;

/// How Grad and Conn combine per-pixel errors before scaling.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Reduction {
    /// Raw sum over the evaluated pixels.
    #[default]
    Sum,
    /// Sum divided by the number of evaluated pixels.
    Mean,
}

impl Reduction {
    fn apply(self, sum: f64, count: usize) -> f64 {
        match self {
            Reduction::Sum => sum,
            Reduction::Mean => sum / count as f64,
        }
    }
}

/// Checks dimensions and returns the number of evaluated pixels.
fn prepare(pred: &AlphaMatte, gt: &AlphaMatte, region: Option<&Mask>) -> Result<usize> {
    ensure_same(gt.dims(), pred.dims())?;
    let count = match region {
        Some(mask) => {
            ensure_same(gt.dims(), mask.dims())?;
            mask.count()
        }
        None => gt.len(),
    };
    if count == 0 {
        return Err(MatteError::EmptyMask);
    }
    Ok(count)
}

#[inline]
fn selected(region: Option<&Mask>, index: usize) -> bool {
    region.is_none_or(|m| m.as_slice()[index])
}
