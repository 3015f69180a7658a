//! Connectivity error.
//!
//! The source region is the largest 4-connected set where both mattes are
//! fully opaque. For each pixel, `l` is the highest threshold `k / 10` at which
//! the pixel still reaches the source through pixels where both mattes are at
//! least that opaque (0 if it never does). With `d = alpha - l`, a pixel's
//! degree of connectivity is `phi = 1 - d` when `d >= 0.15` and 1 otherwise.

use std::collections::VecDeque;

use super::{prepare, selected, Reduction, CONN_SCALE};
use crate::connectivity::{connected_components, for_each_neighbor, Connectivity};
use crate::error::{MatteError, Result};
use crate::image::{AlphaMatte, Mask};

/// Thresholds `k / CONN_STEPS` for `k = 1..=CONN_STEPS`.
pub const CONN_STEPS: u32 = 10;
pub const CONN_DELTA: f64 = 0.15;

/// `alpha / 255 >= k / CONN_STEPS`, evaluated exactly in integers.
#[inline]
fn at_least(value: u8, k: u32) -> bool {
    u32::from(value) * CONN_STEPS >= 255 * k
}

fn level_map(pred: &AlphaMatte, gt: &AlphaMatte) -> Result<Vec<f64>> {
    let (w, h) = gt.dims();
    let (p, g) = (pred.as_slice(), gt.as_slice());
    let opaque = Mask::new(w, h, p.iter().zip(g).map(|(&a, &b)| a == 255 && b == 255).collect())?;
    let regions = connected_components(&opaque, Connectivity::Four);
    let source = regions
        .region_sizes()
        .iter()
        .enumerate()
        .max_by(|(ia, a), (ib, b)| a.cmp(b).then(ib.cmp(ia)))
        .map(|(i, _)| i as u32 + 1)
        .ok_or(MatteError::ConnUndefined)?;
    let seeds: Vec<usize> = regions
        .label_map()
        .iter()
        .enumerate()
        .filter(|(_, &l)| l == source)
        .map(|(i, _)| i)
        .collect();

    let mut level = vec![0.0; w * h];
    let mut seen = vec![0u32; w * h];
    let mut queue = VecDeque::new();
    for k in 1..=CONN_STEPS {
        let t = f64::from(k) / f64::from(CONN_STEPS);
        queue.clear();
        for &s in &seeds {
            seen[s] = k;
            queue.push_back(s);
        }
        while let Some(i) = queue.pop_front() {
            level[i] = t;
            for_each_neighbor(i, w, h, Connectivity::Four, |n| {
                if seen[n] != k && at_least(p[n], k) && at_least(g[n], k) {
                    seen[n] = k;
                    queue.push_back(n);
                }
            });
        }
    }
    Ok(level)
}

#[inline]
fn phi(value: u8, level: f64) -> f64 {
    let d = f64::from(value) / 255.0 - level;
    if d >= CONN_DELTA {
        1.0 - d
    } else {
        1.0
    }
}

/// Connectivity error, summed, ×10⁻³.
pub fn conn(pred: &AlphaMatte, gt: &AlphaMatte, region: Option<&Mask>) -> Result<f64> {
    conn_with(pred, gt, region, Reduction::Sum)
}

pub fn conn_with(
    pred: &AlphaMatte,
    gt: &AlphaMatte,
    region: Option<&Mask>,
    reduction: Reduction,
) -> Result<f64> {
    let count = prepare(pred, gt, region)?;
    let level = level_map(pred, gt)?;
    let sum: f64 = level
        .iter()
        .zip(pred.as_slice().iter().zip(gt.as_slice()))
        .enumerate()
        .filter(|(i, _)| selected(region, *i))
        .map(|(_, (&l, (&p, &g)))| (phi(p, l) - phi(g, l)).abs())
        .sum();
    Ok(reduction.apply(sum, count) * CONN_SCALE)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn integer_thresholds() {
        assert!(at_least(51, 2));
        assert!(!at_least(50, 2));
        assert!(at_least(255, 10));
        assert!(!at_least(254, 10));
    }

    #[test]
    fn identical_and_binary_pairs_score_zero() {
        let a = AlphaMatte::from_fn(8, 8, |r, c| if r > 2 { 255 } else { (c * 30) as u8 }).unwrap();
        assert_eq!(conn(&a, &a, None).unwrap(), 0.0);
        let b = AlphaMatte::from_fn(8, 8, |r, c| if r + c > 6 { 255 } else { 0 }).unwrap();
        assert_eq!(conn(&b, &b, None).unwrap(), 0.0);
    }

    #[test]
    fn undefined_without_common_opaque_pixels() {
        let a = AlphaMatte::filled(4, 4, 200).unwrap();
        assert!(matches!(conn(&a, &a, None), Err(MatteError::ConnUndefined)));
    }

    #[test]
    fn detached_blob_costs_its_disconnection() {
        let gt = AlphaMatte::from_fn(8, 8, |_, c| if c < 4 { 255 } else { 0 }).unwrap();
        let mut pred = gt.clone();
        pred.set(3, 6, 255);
        // l = 0 at the blob: phi_pred = 0, phi_gt = 1
        assert!((conn(&pred, &gt, None).unwrap() - 1e-3).abs() < 1e-15);
    }
}
