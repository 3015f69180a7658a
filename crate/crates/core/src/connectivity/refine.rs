//! Connectivity-aware alpha refinement.
//!
//! Semi-transparent pixels are trusted only when they belong to an
//! 8-connected semi-transparent component that touches the background. Every
//! other semi-transparent pixel is treated as noise and made opaque, after
//! which only the dominant 4-connected foreground component is kept.

use crate::connectivity::components::{
    background_regions, connected_components, edge_seed_points, grow_semitransparent, Connectivity,
    RegionSet, SeedSet,
};
use crate::error::{MatteError, Result};
use crate::image::{AlphaMatte, InverseAlpha, Mask};
use crate::matte::invert_alpha;

/// Every intermediate of a refinement pass.
#[derive(Clone, Debug)]
pub struct Refinement {
    pub inverse: InverseAlpha,
    pub background: RegionSet,
    pub seeds: SeedSet,
    pub semi: RegionSet,
    /// Input with untrusted semi-transparent pixels set to 255.
    pub filled: AlphaMatte,
    pub foreground: RegionSet,
    /// Label of the kept component in `foreground`.
    pub subject_label: u32,
    pub refined: AlphaMatte,
}

impl Refinement {
    /// Semi-transparent input pixels whose value the pass changed.
    pub fn corrected_semi_pixels(&self, original: &AlphaMatte) -> usize {
        self.inverse
            .mask()
            .as_slice()
            .iter()
            .zip(original.as_slice().iter().zip(self.refined.as_slice()))
            .filter(|(&semi, (a, b))| semi && a != b)
            .count()
    }
}

pub fn refine(alpha: &AlphaMatte) -> Result<AlphaMatte> {
    refine_detailed(alpha).map(|r| r.refined)
}

pub fn refine_detailed(alpha: &AlphaMatte) -> Result<Refinement> {
    let inverse = invert_alpha(alpha);
    let background = background_regions(alpha);
    let seeds = edge_seed_points(&inverse, &background)?;
    let semi = grow_semitransparent(&inverse, &seeds)?;

    let mut filled = alpha.clone();
    for (idx, v) in filled.as_mut_slice().iter_mut().enumerate() {
        if inverse.mask().as_slice()[idx] && !semi.contains_index(idx) {
            *v = 255;
        }
    }

    let opaque_or_semi = Mask::new(
        alpha.width(),
        alpha.height(),
        filled.as_slice().iter().map(|&v| v > 0).collect(),
    )?;
    let foreground = connected_components(&opaque_or_semi, Connectivity::Four);
    let subject_label = dominant_region(&foreground, &filled).ok_or(MatteError::EmptyForeground)?;

    let mut refined = filled.clone();
    for (v, &label) in refined.as_mut_slice().iter_mut().zip(foreground.label_map()) {
        if label != subject_label {
            *v = 0;
        }
    }

    Ok(Refinement {
        inverse,
        background,
        seeds,
        semi,
        filled,
        foreground,
        subject_label,
        refined,
    })
}

/// Largest region by pixel count; ties go to the larger alpha sum, then to the
/// region discovered first in row-major order (its smaller label).
fn dominant_region(regions: &RegionSet, alpha: &AlphaMatte) -> Option<u32> {
    let mut sums = vec![0u64; regions.region_count()];
    for (&label, &v) in regions.label_map().iter().zip(alpha.as_slice()) {
        if label != 0 {
            sums[label as usize - 1] += u64::from(v);
        }
    }
    regions
        .region_sizes()
        .iter()
        .zip(&sums)
        .enumerate()
        .max_by(|(ia, (sa, ua)), (ib, (sb, ub))| sa.cmp(sb).then(ua.cmp(ub)).then(ib.cmp(ia)))
        .map(|(i, _)| i as u32 + 1)
}
