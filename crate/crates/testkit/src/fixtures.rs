//! Seeded synthetic mattes and images.

use mattekit_core::{AlphaMatte, Mask, RgbImage};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Elliptical subject with a soft edge band: 255 inside, a 1..=254 ramp
/// across the band, 0 outside. The ellipse keeps a margin from the border.
pub fn clean_subject(rng: &mut impl Rng, width: usize, height: usize) -> AlphaMatte {
    let (w, h) = (width as f64, height as f64);
    let cy = h / 2.0 + rng.random_range(-h * 0.05..=h * 0.05);
    let cx = w / 2.0 + rng.random_range(-w * 0.05..=w * 0.05);
    let ry = rng.random_range(h * 0.2..h * 0.3);
    let rx = rng.random_range(w * 0.2..w * 0.3);
    let band_px = rng.random_range(1.0..4.0);
    let band = band_px / ry.min(rx);
    AlphaMatte::from_fn(width, height, |r, c| {
        let dy = (r as f64 - cy) / ry;
        let dx = (c as f64 - cx) / rx;
        let rho = (dy * dy + dx * dx).sqrt();
        if rho < 1.0 {
            255
        } else if rho < 1.0 + band {
            let t = (rho - 1.0) / band;
            (254.0 * (1.0 - t)).round().clamp(1.0, 254.0) as u8
        } else {
            0
        }
    })
    .expect("positive dimensions")
}

fn far_from(grid: &[bool], w: usize, h: usize, r: usize, c: usize, reach: usize) -> bool {
    let r0 = r.saturating_sub(reach);
    let c0 = c.saturating_sub(reach);
    for rr in r0..=(r + reach).min(h - 1) {
        for cc in c0..=(c + reach).min(w - 1) {
            if grid[rr * w + cc] {
                return false;
            }
        }
    }
    true
}

/// Noisy variant of `clean` whose refinement must give back `clean` exactly:
/// semi-transparent and opaque specks in the background, semi-transparent
/// specks inside the opaque interior, and detached opaque islands.
pub fn inject_noise(rng: &mut impl Rng, clean: &AlphaMatte) -> AlphaMatte {
    let (w, h) = clean.dims();
    let c = clean.as_slice();
    let mut noisy = clean.clone();
    // pixels noise must keep clear of, grown as blobs are placed
    let mut not_background: Vec<bool> = c.iter().map(|&v| v != 0).collect();
    let not_interior: Vec<bool> = c.iter().map(|&v| v != 255).collect();

    let shapes: [&[(usize, usize)]; 4] = [
        &[(0, 0)],
        &[(0, 0), (0, 1)],
        &[(0, 0), (1, 0), (1, 1)],
        &[(0, 0), (0, 1), (1, 0), (1, 1)],
    ];

    let background_blobs = rng.random_range(1..6);
    let islands = rng.random_range(0..3);
    let interior_blobs = rng.random_range(1..5);

    let place = |rng: &mut dyn rand::RngCore,
                     noisy: &mut AlphaMatte,
                     avoid: &mut Vec<bool>,
                     value: &dyn Fn(&mut dyn rand::RngCore) -> u8,
                     mark: bool| {
        for _ in 0..50 {
            let shape = shapes[rng.random_range(0..shapes.len())];
            let r = rng.random_range(0..h.saturating_sub(1).max(1));
            let col = rng.random_range(0..w.saturating_sub(1).max(1));
            let cells: Vec<(usize, usize)> = shape
                .iter()
                .map(|&(dr, dc)| (r + dr, col + dc))
                .filter(|&(rr, cc)| rr < h && cc < w)
                .collect();
            if cells.iter().all(|&(rr, cc)| far_from(avoid, w, h, rr, cc, 2)) {
                for &(rr, cc) in &cells {
                    noisy.set(rr, cc, value(rng));
                    if mark {
                        avoid[rr * w + cc] = true;
                    }
                }
                return;
            }
        }
    };

    let semi = |rng: &mut dyn rand::RngCore| rng.random_range(1..=254u8);
    let mixed = |rng: &mut dyn rand::RngCore| {
        if rng.random_bool(0.3) {
            255
        } else {
            rng.random_range(1..=254u8)
        }
    };
    let opaque = |_: &mut dyn rand::RngCore| 255u8;

    for _ in 0..background_blobs {
        place(rng, &mut noisy, &mut not_background, &mixed, true);
    }
    for _ in 0..islands {
        place(rng, &mut noisy, &mut not_background, &opaque, true);
    }
    let mut interior_avoid = not_interior;
    for _ in 0..interior_blobs {
        place(rng, &mut noisy, &mut interior_avoid, &semi, false);
    }
    noisy
}

/// Unstructured matte mixing hard zeros, hard ones and arbitrary values,
/// with at least one nonzero pixel.
pub fn random_matte(rng: &mut impl Rng, width: usize, height: usize) -> AlphaMatte {
    let p_zero = rng.random_range(0.1..0.6);
    let p_one = rng.random_range(0.1..0.6);
    let mut a = AlphaMatte::from_fn(width, height, |_, _| {
        let u: f64 = rng.random();
        if u < p_zero {
            0
        } else if u < p_zero + p_one {
            255
        } else {
            rng.random_range(1..=254)
        }
    })
    .expect("positive dimensions");
    if a.as_slice().iter().all(|&v| v == 0) {
        a.set(height / 2, width / 2, 255);
    }
    a
}

pub fn random_mask(rng: &mut impl Rng, width: usize, height: usize, density: f64) -> Mask {
    Mask::from_fn(width, height, |_, _| rng.random_bool(density)).expect("positive dimensions")
}

/// Random matte whose values come only from a coarse palette, which yields
/// plenty of shared opaque pixels for connectivity metrics.
pub fn blocky_matte(rng: &mut impl Rng, width: usize, height: usize) -> AlphaMatte {
    const LEVELS: [u8; 6] = [0, 40, 128, 200, 255, 255];
    AlphaMatte::from_fn(width, height, |_, _| LEVELS[rng.random_range(0..LEVELS.len())])
        .expect("positive dimensions")
}

pub fn random_rgb(rng: &mut impl Rng, width: usize, height: usize) -> RgbImage {
    RgbImage::from_fn(width, height, |_, _| [rng.random(), rng.random(), rng.random()])
        .expect("positive dimensions")
}

/// Smoothly varying color image, used as synthetic portrait foregrounds and
/// backgrounds.
pub fn gradient_rgb(rng: &mut impl Rng, width: usize, height: usize) -> RgbImage {
    let base: [f64; 3] = [rng.random_range(0.0..255.0), rng.random_range(0.0..255.0), rng.random_range(0.0..255.0)];
    let slope: [f64; 3] = [rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0)];
    RgbImage::from_fn(width, height, |r, c| {
        let mut px = [0u8; 3];
        for ch in 0..3 {
            let v = base[ch] + slope[ch] * (r as f64 + c as f64 * 0.5);
            px[ch] = v.rem_euclid(255.0) as u8;
        }
        px
    })
    .expect("positive dimensions")
}
