//! Synthetic datasets written as PNG files.

use std::path::Path;

use mattekit_core::io::{write_alpha, write_rgb};
use mattekit_core::{AlphaMatte, RgbImage};
use rand::Rng;

use crate::fixtures::{clean_subject, gradient_rgb, inject_noise, rng};

/// Six-by-six matte: columns 0-1 background, column 2 a 128 edge band,
/// columns 3-5 opaque, with a 64 speck at (2, 0) and a 128 speck at (4, 4).
pub fn six_by_six_noisy() -> AlphaMatte {
    let mut a = six_by_six_clean();
    a.set(2, 0, 64);
    a.set(4, 4, 128);
    a
}

pub fn six_by_six_clean() -> AlphaMatte {
    AlphaMatte::from_fn(6, 6, |_, c| match c {
        0 | 1 => 0,
        2 => 128,
        _ => 255,
    })
    .expect("positive dimensions")
}

/// Nearest-neighbour enlargement by an integer factor.
pub fn scale_up(alpha: &AlphaMatte, factor: usize) -> AlphaMatte {
    let (w, h) = alpha.dims();
    AlphaMatte::from_fn(w * factor, h * factor, |r, c| alpha.get(r / factor, c / factor))
        .expect("positive dimensions")
}

pub fn write_pair(dir: &Path, id: &str, rgb: &RgbImage, alpha: &AlphaMatte) {
    std::fs::create_dir_all(dir).expect("create fixture dir");
    write_rgb(dir.join(format!("{id}_rgb.png")), rgb).expect("write rgb");
    write_alpha(dir.join(format!("{id}_alpha.png")), alpha).expect("write alpha");
}

/// Writes `count` portrait-like pairs `s00`, `s01`, ... with clean mattes
/// (`noisy = false`) or mattes carrying removable noise. Returns the clean
/// mattes in id order.
pub fn write_dataset(dir: &Path, count: usize, width: usize, height: usize, seed: u64, noisy: bool) -> Vec<AlphaMatte> {
    let mut r = rng(seed);
    (0..count)
        .map(|i| {
            let clean = clean_subject(&mut r, width, height);
            let alpha = if noisy { inject_noise(&mut r, &clean) } else { clean.clone() };
            let fg = gradient_rgb(&mut r, width, height);
            write_pair(dir, &format!("s{i:02}"), &fg, &alpha);
            clean
        })
        .collect()
}

/// Background images of assorted sizes and aspect ratios.
pub fn write_backgrounds(dir: &Path, count: usize, seed: u64) {
    std::fs::create_dir_all(dir).expect("create background dir");
    let mut r = rng(seed);
    for i in 0..count {
        let w = r.random_range(24..96);
        let h = r.random_range(24..96);
        let img = gradient_rgb(&mut r, w, h);
        write_rgb(dir.join(format!("bg{i:02}.png")), &img).expect("write background");
    }
}
