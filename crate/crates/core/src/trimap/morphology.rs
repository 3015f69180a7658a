//! Binary erosion and dilation with a discrete disc structuring element.

use crate::image::Mask;

/// Half-widths of the disc rows: entry `dy + radius` is the largest `dx`
/// with `dx² + dy² <= radius²`.
pub fn disc_half_widths(radius: usize) -> Vec<usize> {
    let r2 = radius * radius;
    (0..=2 * radius)
        .map(|i| {
            let dy = i.abs_diff(radius);
            let rem = r2 - dy * dy;
            let mut w = (rem as f64).sqrt() as usize;
            while w * w > rem {
                w -= 1;
            }
            while (w + 1) * (w + 1) <= rem {
                w += 1;
            }
            w
        })
        .collect()
}

/// Erosion that treats pixels beyond the image edge as outside the mask.
pub fn erode(mask: &Mask, radius: usize) -> Mask {
    erode_with_border(mask, radius, false)
}

/// Dilation; pixels beyond the image edge never contribute.
pub fn dilate(mask: &Mask, radius: usize) -> Mask {
    erode_with_border(&mask.complement(), radius, true).complement()
}

/// Erosion where out-of-image pixels count as set when `border_set` is true.
pub fn erode_with_border(mask: &Mask, radius: usize, border_set: bool) -> Mask {
    if radius == 0 {
        return mask.clone();
    }
    let (w, h) = mask.dims();
    let src = mask.as_slice();
    let half = disc_half_widths(radius);

    // holes[y][x + 1] = number of unset pixels in row y before column x + 1
    let holes: Vec<Vec<u32>> = src
        .chunks(w)
        .map(|row| {
            let mut acc = Vec::with_capacity(w + 1);
            acc.push(0u32);
            let mut n = 0;
            for &b in row {
                n += u32::from(!b);
                acc.push(n);
            }
            acc
        })
        .collect();

    let mut out = vec![true; w * h];
    for y in 0..h {
        let dst = &mut out[y * w..(y + 1) * w];
        for (i, &hw) in half.iter().enumerate() {
            let sy = y as isize + i as isize - radius as isize;
            if sy < 0 || sy as usize >= h {
                if !border_set {
                    dst.iter_mut().for_each(|v| *v = false);
                }
                continue;
            }
            let prefix = &holes[sy as usize];
            for (x, v) in dst.iter_mut().enumerate() {
                if !*v {
                    continue;
                }
                let lo = x as isize - hw as isize;
                let hi = x + hw;
                if !border_set && (lo < 0 || hi >= w) {
                    *v = false;
                    continue;
                }
                let lo = lo.max(0) as usize;
                let hi = hi.min(w - 1);
                if prefix[hi + 1] != prefix[lo] {
                    *v = false;
                }
            }
        }
    }
    Mask::new(w, h, out).expect("same dimensions as input")
}
