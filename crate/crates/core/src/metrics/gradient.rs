//! Gradient error from first-order Gaussian derivative filters.

use super::{prepare, selected, Reduction, GRAD_SCALE};
use crate::error::Result;
use crate::image::{AlphaMatte, Mask};

pub const GRAD_SIGMA: f64 = 1.4;

/// Symmetric reflection: `... c b a | a b c ... z | z y x ...`.
#[inline]
fn reflect(i: isize, n: usize) -> usize {
    let period = 2 * n as isize;
    let m = i.rem_euclid(period) as usize;
    if m < n {
        m
    } else {
        2 * n - 1 - m
    }
}

/// 1-D Gaussian and its derivative sampled on `[-r, r]` with `r = ceil(3 sigma)`,
/// plus the factor that gives the separable 2-D kernel `g(y) dg(x)` unit L2 norm.
pub fn gaussian_derivative_kernels(sigma: f64) -> (Vec<f64>, Vec<f64>, f64) {
    let radius = (3.0 * sigma).ceil() as isize;
    let norm = 1.0 / (sigma * (2.0 * std::f64::consts::PI).sqrt());
    let gauss: Vec<f64> = (-radius..=radius)
        .map(|x| {
            let x = x as f64;
            norm * (-x * x / (2.0 * sigma * sigma)).exp()
        })
        .collect();
    let deriv: Vec<f64> = (-radius..=radius)
        .zip(&gauss)
        .map(|(x, g)| -(x as f64) / (sigma * sigma) * g)
        .collect();
    let l2 = |v: &[f64]| v.iter().map(|x| x * x).sum::<f64>().sqrt();
    let scale = 1.0 / (l2(&gauss) * l2(&deriv));
    (gauss, deriv, scale)
}

/// Correlates rows (`horizontal`) or columns with a 1-D kernel.
fn correlate(src: &[f64], w: usize, h: usize, kernel: &[f64], horizontal: bool) -> Vec<f64> {
    let r = (kernel.len() / 2) as isize;
    let mut out = vec![0.0; w * h];
    for y in 0..h {
        for x in 0..w {
            let mut acc = 0.0;
            for (k, &kv) in kernel.iter().enumerate() {
                let off = k as isize - r;
                let idx = if horizontal {
                    y * w + reflect(x as isize + off, w)
                } else {
                    reflect(y as isize + off, h) * w + x
                };
                acc += kv * src[idx];
            }
            out[y * w + x] = acc;
        }
    }
    out
}

/// Per-pixel gradient magnitude of the normalized matte.
pub fn gradient_magnitude(alpha: &AlphaMatte, sigma: f64) -> Vec<f64> {
    let (w, h) = alpha.dims();
    let (gauss, deriv, scale) = gaussian_derivative_kernels(sigma);
    let src: Vec<f64> = alpha.as_slice().iter().map(|&v| f64::from(v) / 255.0).collect();
    let gx = correlate(&correlate(&src, w, h, &gauss, false), w, h, &deriv, true);
    let gy = correlate(&correlate(&src, w, h, &gauss, true), w, h, &deriv, false);
    gx.iter()
        .zip(&gy)
        .map(|(x, y)| scale * (x * x + y * y).sqrt())
        .collect()
}

/// Gradient error, summed, ×10⁻³.
pub fn grad(pred: &AlphaMatte, gt: &AlphaMatte, region: Option<&Mask>) -> Result<f64> {
    grad_with(pred, gt, region, Reduction::Sum)
}

pub fn grad_with(
    pred: &AlphaMatte,
    gt: &AlphaMatte,
    region: Option<&Mask>,
    reduction: Reduction,
) -> Result<f64> {
    let count = prepare(pred, gt, region)?;
    let mp = gradient_magnitude(pred, GRAD_SIGMA);
    let mg = gradient_magnitude(gt, GRAD_SIGMA);
    let sum: f64 = mp
        .iter()
        .zip(&mg)
        .enumerate()
        .filter(|(i, _)| selected(region, *i))
        .map(|(_, (p, g))| (p - g) * (p - g))
        .sum();
    Ok(reduction.apply(sum, count) * GRAD_SCALE)
}
