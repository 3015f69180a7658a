use serde::{Deserialize, Serialize};

use crate::connectivity::components::{for_each_neighbor, Connectivity};
use crate::connectivity::refine::refine_detailed;
use crate::image::AlphaMatte;
use crate::matte::invert_alpha;

/// Summary of how much of a matte's semi-transparent set looks like noise.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ScreeningStats {
    /// Semi-transparent pixels over all pixels.
    pub semi_fraction: f64,
    /// Share of semi-transparent pixels that sit in kept edge components
    /// which never touch an opaque pixel.
    pub attached_noise_fraction: f64,
    /// Share of semi-transparent pixels that refinement changes.
    pub removed_fraction: f64,
}

pub fn screening_stats(alpha: &AlphaMatte) -> ScreeningStats {
    let semi_count = invert_alpha(alpha).count();
    if semi_count == 0 {
        return ScreeningStats::default();
    }
    // a non-empty semi-transparent set guarantees a foreground component
    let pass = refine_detailed(alpha).expect("semi-transparent pixels imply a foreground");

    let (w, h) = alpha.dims();
    let values = alpha.as_slice();
    let mut touches_opaque = vec![false; pass.semi.region_count()];
    for (idx, &label) in pass.semi.label_map().iter().enumerate() {
        if label == 0 || touches_opaque[label as usize - 1] {
            continue;
        }
        let mut hit = false;
        for_each_neighbor(idx, w, h, Connectivity::Eight, |n| hit |= values[n] == 255);
        touches_opaque[label as usize - 1] = hit;
    }
    let detached: usize = pass
        .semi
        .region_sizes()
        .iter()
        .zip(&touches_opaque)
        .filter(|(_, &t)| !t)
        .map(|(&s, _)| s)
        .sum();

    let semi = semi_count as f64;
    ScreeningStats {
        semi_fraction: semi / alpha.len() as f64,
        attached_noise_fraction: detached as f64 / semi,
        removed_fraction: pass.corrected_semi_pixels(alpha) as f64 / semi,
    }
}

/// Per-field upper limits for automatic screening.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ScreeningThresholds {
    pub semi_fraction: f64,
    pub attached_noise_fraction: f64,
    pub removed_fraction: f64,
}

impl Default for ScreeningThresholds {
    fn default() -> Self {
        Self {
            semi_fraction: 0.25,
            attached_noise_fraction: 0.05,
            removed_fraction: 0.30,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ScreenVerdict {
    Pass,
    Flag,
}

/// Flags a sample when any statistic strictly exceeds its threshold.
pub fn auto_screen(stats: &ScreeningStats, thresholds: &ScreeningThresholds) -> ScreenVerdict {
    let over = stats.semi_fraction > thresholds.semi_fraction
        || stats.attached_noise_fraction > thresholds.attached_noise_fraction
        || stats.removed_fraction > thresholds.removed_fraction;
    if over {
        ScreenVerdict::Flag
    } else {
        ScreenVerdict::Pass
    }
}
