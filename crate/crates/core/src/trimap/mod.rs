//! Trimaps built by eroding the sure-foreground and sure-background sets.
//!
//! The area beyond the image edge counts as background: it never supports
//! foreground under erosion, but it does support background.

mod morphology;

pub use morphology::{dilate, disc_half_widths, erode, erode_with_border};

use crate::error::{MatteError, Result};
use crate::image::{AlphaMatte, Mask};

pub const BACKGROUND: u8 = 0;
pub const UNKNOWN: u8 = 128;
pub const FOREGROUND: u8 = 255;

/// Three-valued map over {0 background, 128 unknown, 255 foreground}.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Trimap {
    width: usize,
    height: usize,
    data: Vec<u8>,
}

impl Trimap {
    pub fn new(width: usize, height: usize, data: Vec<u8>) -> Result<Self> {
        // reuse the matte's dimension checks
        let data = AlphaMatte::new(width, height, data)?.into_vec();
        if let Some((index, &value)) = data
            .iter()
            .enumerate()
            .find(|(_, &v)| !matches!(v, BACKGROUND | UNKNOWN | FOREGROUND))
        {
            return Err(MatteError::InvalidValue {
                index,
                value,
                reason: "trimaps hold only 0, 128 or 255",
            });
        }
        Ok(Self { width, height, data })
    }

    /// Foreground wins where the two sets overlap; callers pass disjoint sets.
    pub fn from_sets(foreground: &Mask, background: &Mask) -> Result<Self> {
        crate::image::ensure_same(foreground.dims(), background.dims())?;
        let data = foreground
            .as_slice()
            .iter()
            .zip(background.as_slice())
            .map(|(&f, &b)| match (f, b) {
                (true, _) => FOREGROUND,
                (false, true) => BACKGROUND,
                (false, false) => UNKNOWN,
            })
            .collect();
        let (width, height) = foreground.dims();
        Ok(Self { width, height, data })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.width, self.height)
    }

    pub fn as_slice(&self) -> &[u8] {
        &self.data
    }

    pub fn get(&self, row: usize, col: usize) -> u8 {
        self.data[row * self.width + col]
    }

    fn select(&self, value: u8) -> Mask {
        let data = self.data.iter().map(|&v| v == value).collect();
        Mask::new(self.width, self.height, data).expect("trimap has valid dimensions")
    }

    pub fn unknown(&self) -> Mask {
        self.select(UNKNOWN)
    }

    pub fn foreground(&self) -> Mask {
        self.select(FOREGROUND)
    }

    pub fn background(&self) -> Mask {
        self.select(BACKGROUND)
    }
}

/// Band radius for an image of the given size: 10 px at a 512 px short side,
/// scaled linearly, never below 1.
pub fn default_band(width: usize, height: usize) -> usize {
    let short = width.min(height) as f64;
    ((10.0 * short / 512.0).round() as usize).max(1)
}

/// Sure foreground is `{alpha = 255}` eroded by `fg_erode`; sure background is
/// `{alpha = 0}` eroded by `bg_erode`. Everything else is unknown.
pub fn trimap_from_alpha(alpha: &AlphaMatte, fg_erode: usize, bg_erode: usize) -> Trimap {
    let (w, h) = alpha.dims();
    let opaque = Mask::new(w, h, alpha.as_slice().iter().map(|&v| v == 255).collect())
        .expect("matte has valid dimensions");
    let clear = Mask::new(w, h, alpha.as_slice().iter().map(|&v| v == 0).collect())
        .expect("matte has valid dimensions");
    let fg = erode_with_border(&opaque, fg_erode, false);
    let bg = erode_with_border(&clear, bg_erode, true);
    Trimap::from_sets(&fg, &bg).expect("sets share dimensions")
}

/// Trimap around a binary segmentation: both the mask and its complement are
/// eroded by `band`.
pub fn trimap_from_mask(mask: &Mask, band: usize) -> Trimap {
    let fg = erode_with_border(mask, band, false);
    let bg = erode_with_border(&mask.complement(), band, true);
    Trimap::from_sets(&fg, &bg).expect("sets share dimensions")
}
