//! The compositing equation, inverse alpha and chroma-key extraction.

use crate::error::Result;
use crate::image::{ensure_same, AlphaMatte, InverseAlpha, KeyColor, Mask, RgbImage};

/// Marks every strictly semi-transparent pixel.
pub fn invert_alpha(alpha: &AlphaMatte) -> InverseAlpha {
    let data = alpha.as_slice().iter().map(|&v| v != 0 && v != 255).collect();
    let mask = Mask::new(alpha.width(), alpha.height(), data).expect("dimensions come from a valid matte");
    InverseAlpha::from_mask(mask)
}

/// Quantizes a value already in `[0, 255]` space, rounding half away from zero.
#[inline]
pub(crate) fn quantize(value: f64) -> u8 {
    value.round().clamp(0.0, 255.0) as u8
}

#[inline]
fn blend(a: f64, fg: u8, bg: u8) -> u8 {
    quantize(a * f64::from(fg) + (1.0 - a) * f64::from(bg))
}

/// `I = a F + (1 - a) B` per channel, with `a = alpha / 255`.
pub fn composite(fg: &RgbImage, alpha: &AlphaMatte, bg: &RgbImage) -> Result<RgbImage> {
    ensure_same(fg.dims(), alpha.dims())?;
    ensure_same(fg.dims(), bg.dims())?;
    let data = fg
        .pixels()
        .iter()
        .zip(alpha.as_slice())
        .zip(bg.pixels())
        .map(|((f, &av), b)| {
            let a = f64::from(av) / 255.0;
            [blend(a, f[0], b[0]), blend(a, f[1], b[1]), blend(a, f[2], b[2])]
        })
        .collect();
    RgbImage::new(fg.width(), fg.height(), data)
}

pub fn solid_background(color: KeyColor, width: usize, height: usize) -> Result<RgbImage> {
    RgbImage::new(width, height, vec![color.channels(); width.saturating_mul(height)])
}

/// Default per-channel deviation from the key at which a pixel counts as opaque.
pub const DEFAULT_KEY_TOLERANCE: u8 = 64;

/// Recovers an `(alpha, foreground)` pair from a composite over a known solid
/// key color.
///
/// For each channel the deviation `|I - K|` is divided by the smaller of the
/// tolerance band and the distance from `K` to the channel extreme (0 or 255)
/// on the pixel's side. Alpha is the largest such ratio, rounded *up* to the
/// next 8-bit level so that the unmixed foreground
/// `F = K + (I - K) / alpha` always stays inside `[0, 255]`. Re-compositing
/// the result over the key therefore reproduces the input within one level.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ChromaKeyer {
    pub key: KeyColor,
    pub tolerance: u8,
}

impl ChromaKeyer {
    pub fn new(key: KeyColor) -> Self {
        Self {
            key,
            tolerance: DEFAULT_KEY_TOLERANCE,
        }
    }

    pub fn with_tolerance(mut self, tolerance: u8) -> Self {
        self.tolerance = tolerance.max(1);
        self
    }

    /// Quantized alpha for a single composite pixel.
    pub fn pixel_alpha(&self, px: [u8; 3]) -> u8 {
        let tol = u32::from(self.tolerance.max(1));
        let mut alpha = 0u32;
        for (&i, k) in px.iter().zip(self.key.channels()) {
            let (i, k) = (u32::from(i), u32::from(k));
            let dev = i.abs_diff(k);
            if dev == 0 {
                continue;
            }
            let extreme = if i > k { 255 - k } else { k };
            let denom = tol.min(extreme);
            alpha = alpha.max((255 * dev).div_ceil(denom));
        }
        alpha.min(255) as u8
    }

    /// Unmixes the foreground color of one pixel given its quantized alpha.
    pub fn pixel_foreground(&self, px: [u8; 3], alpha: u8) -> [u8; 3] {
        if alpha == 0 {
            return px;
        }
        let inv = 255.0 / f64::from(alpha);
        let key = self.key.channels();
        let mut out = [0u8; 3];
        for c in 0..3 {
            let k = f64::from(key[c]);
            out[c] = quantize(k + (f64::from(px[c]) - k) * inv);
        }
        out
    }

    pub fn extract(&self, composite: &RgbImage) -> (AlphaMatte, RgbImage) {
        let mut alphas = Vec::with_capacity(composite.pixels().len());
        let mut fgs = Vec::with_capacity(composite.pixels().len());
        for &px in composite.pixels() {
            let a = self.pixel_alpha(px);
            alphas.push(a);
            fgs.push(self.pixel_foreground(px, a));
        }
        let (w, h) = composite.dims();
        (
            AlphaMatte::new(w, h, alphas).expect("dimensions come from a valid image"),
            RgbImage::new(w, h, fgs).expect("dimensions come from a valid image"),
        )
    }
}

/// Chroma-key extraction with the default tolerance band.
pub fn chroma_extract(composite: &RgbImage, key: KeyColor) -> (AlphaMatte, RgbImage) {
    ChromaKeyer::new(key).extract(composite)
}

/// Largest per-channel absolute difference between two images.
pub fn max_channel_error(a: &RgbImage, b: &RgbImage) -> Result<u8> {
    ensure_same(a.dims(), b.dims())?;
    Ok(a.pixels()
        .iter()
        .zip(b.pixels())
        .flat_map(|(p, q)| (0..3).map(move |c| p[c].abs_diff(q[c])))
        .max()
        .unwrap_or(0))
}
