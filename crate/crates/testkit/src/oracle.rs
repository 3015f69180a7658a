//! Brute-force reference implementations.
//!
//! These deliberately share no algorithmic code with `mattekit-core`: labeling
//! goes through a union-find over explicit adjacency, convolution uses a
//! tabulated 2-D kernel, and connectivity levels are found by checking every
//! threshold for every pixel.

use mattekit_core::{AlphaMatte, Mask};

pub struct UnionFind {
    parent: Vec<usize>,
    size: Vec<usize>,
}

impl UnionFind {
    pub fn new(n: usize) -> Self {
        Self {
            parent: (0..n).collect(),
            size: vec![1; n],
        }
    }

    pub fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    pub fn union(&mut self, a: usize, b: usize) {
        let (mut ra, mut rb) = (self.find(a), self.find(b));
        if ra == rb {
            return;
        }
        if self.size[ra] < self.size[rb] {
            std::mem::swap(&mut ra, &mut rb);
        }
        self.parent[rb] = ra;
        self.size[ra] += self.size[rb];
    }
}

fn neighbors(i: usize, w: usize, h: usize, eight: bool) -> Vec<usize> {
    let (r, c) = ((i / w) as i64, (i % w) as i64);
    let mut out = Vec::new();
    for dr in -1i64..=1 {
        for dc in -1i64..=1 {
            if (dr == 0 && dc == 0) || (!eight && dr != 0 && dc != 0) {
                continue;
            }
            let (nr, nc) = (r + dr, c + dc);
            if nr >= 0 && nc >= 0 && nr < h as i64 && nc < w as i64 {
                out.push(nr as usize * w + nc as usize);
            }
        }
    }
    out
}

/// Component root per pixel (`None` for unset pixels).
pub fn components(set: &[bool], w: usize, h: usize, eight: bool) -> Vec<Option<usize>> {
    let mut uf = UnionFind::new(set.len());
    for i in 0..set.len() {
        if set[i] {
            for n in neighbors(i, w, h, eight) {
                if set[n] {
                    uf.union(i, n);
                }
            }
        }
    }
    (0..set.len()).map(|i| set[i].then(|| uf.find(i))).collect()
}

/// True when two labelings induce the same partition of the set pixels.
pub fn same_partition(labels: &[u32], roots: &[Option<usize>]) -> bool {
    use std::collections::HashMap;
    let mut fwd: HashMap<u32, usize> = HashMap::new();
    let mut back: HashMap<usize, u32> = HashMap::new();
    for (&l, &r) in labels.iter().zip(roots) {
        match (l, r) {
            (0, None) => {}
            (0, Some(_)) | (_, None) => return false,
            (l, Some(r)) => {
                if *fwd.entry(l).or_insert(r) != r || *back.entry(r).or_insert(l) != l {
                    return false;
                }
            }
        }
    }
    true
}

/// Step-by-step refinement written directly from the algorithm description.
/// `None` when the matte has no nonzero pixel.
pub fn reference_refine(alpha: &AlphaMatte) -> Option<Vec<u8>> {
    let (w, h) = alpha.dims();
    let a = alpha.as_slice();
    let n = a.len();
    let semi: Vec<bool> = a.iter().map(|&v| v > 0 && v < 255).collect();

    // background regions: every zero pixel belongs to one
    let zero: Vec<bool> = a.iter().map(|&v| v == 0).collect();
    let bg = components(&zero, w, h, false);

    // seeds: semi pixels next to a background-region pixel
    let seed: Vec<bool> = (0..n)
        .map(|i| semi[i] && neighbors(i, w, h, true).iter().any(|&j| bg[j].is_some()))
        .collect();

    // retained semi components: those containing a seed
    let semi_roots = components(&semi, w, h, true);
    let seeded_roots: std::collections::HashSet<usize> =
        (0..n).filter(|&i| seed[i]).filter_map(|i| semi_roots[i]).collect();

    let mut filled = a.to_vec();
    for i in 0..n {
        if semi[i] && !semi_roots[i].is_some_and(|r| seeded_roots.contains(&r)) {
            filled[i] = 255;
        }
    }

    let positive: Vec<bool> = filled.iter().map(|&v| v > 0).collect();
    let roots = components(&positive, w, h, false);
    // (size, alpha sum, first index) per root
    let mut stats: std::collections::BTreeMap<usize, (usize, u64, usize)> = Default::default();
    for (i, root) in roots.iter().enumerate() {
        if let Some(r) = *root {
            let e = stats.entry(r).or_insert((0, 0, i));
            e.0 += 1;
            e.1 += u64::from(filled[i]);
            e.2 = e.2.min(i);
        }
    }
    let best = stats
        .iter()
        .max_by(|a, b| {
            let (sa, ua, fa) = a.1;
            let (sb, ub, fb) = b.1;
            sa.cmp(sb).then(ua.cmp(ub)).then(fb.cmp(fa))
        })
        .map(|(&r, _)| r)?;
    Some(
        (0..n)
            .map(|i| if roots[i] == Some(best) { filled[i] } else { 0 })
            .collect(),
    )
}

fn in_region(region: Option<&Mask>, i: usize) -> bool {
    region.is_none_or(|m| m.as_slice()[i])
}

pub fn naive_mad(pred: &AlphaMatte, gt: &AlphaMatte, region: Option<&Mask>) -> f64 {
    let (w, h) = gt.dims();
    let (mut sum, mut count) = (0.0, 0usize);
    for r in 0..h {
        for c in 0..w {
            if in_region(region, r * w + c) {
                sum += (pred.get(r, c) as f64 / 255.0 - gt.get(r, c) as f64 / 255.0).abs();
                count += 1;
            }
        }
    }
    sum / count as f64 * 1000.0
}

pub fn naive_mse(pred: &AlphaMatte, gt: &AlphaMatte, region: Option<&Mask>) -> f64 {
    let (w, h) = gt.dims();
    let (mut sum, mut count) = (0.0, 0usize);
    for r in 0..h {
        for c in 0..w {
            if in_region(region, r * w + c) {
                let d = pred.get(r, c) as f64 / 255.0 - gt.get(r, c) as f64 / 255.0;
                sum += d * d;
                count += 1;
            }
        }
    }
    sum / count as f64 * 1000.0
}

/// Mirror an index into `0..n` by walking back and forth.
fn mirror(mut i: i64, n: i64) -> usize {
    loop {
        if i < 0 {
            i = -i - 1;
        } else if i >= n {
            i = 2 * n - 1 - i;
        } else {
            return i as usize;
        }
    }
}

/// Explicit `(2r+1)²` kernels `hx[dy][dx] = G(dy) G'(dx)` and `hy = hxᵀ`,
/// each scaled to unit L2 norm.
pub fn tabulated_kernels(sigma: f64) -> (Vec<Vec<f64>>, Vec<Vec<f64>>) {
    let r = (3.0 * sigma).ceil() as i64;
    let gauss = |x: f64| (-x * x / (2.0 * sigma * sigma)).exp() / (sigma * (2.0 * std::f64::consts::PI).sqrt());
    let dgauss = |x: f64| -x * gauss(x) / (sigma * sigma);
    let size = (2 * r + 1) as usize;
    let mut hx = vec![vec![0.0; size]; size];
    for (iy, dy) in (-r..=r).enumerate() {
        for (ix, dx) in (-r..=r).enumerate() {
            hx[iy][ix] = gauss(dy as f64) * dgauss(dx as f64);
        }
    }
    let norm: f64 = hx.iter().flatten().map(|v| v * v).sum::<f64>().sqrt();
    for row in &mut hx {
        for v in row.iter_mut() {
            *v /= norm;
        }
    }
    let mut hy = vec![vec![0.0; size]; size];
    for i in 0..size {
        for j in 0..size {
            hy[i][j] = hx[j][i];
        }
    }
    (hx, hy)
}

fn direct_magnitude(alpha: &AlphaMatte, sigma: f64) -> Vec<f64> {
    let (w, h) = alpha.dims();
    let (hx, hy) = tabulated_kernels(sigma);
    let r = (hx.len() / 2) as i64;
    let mut out = vec![0.0; w * h];
    for y in 0..h as i64 {
        for x in 0..w as i64 {
            let (mut gx, mut gy) = (0.0, 0.0);
            for dy in -r..=r {
                for dx in -r..=r {
                    let v = alpha.get(mirror(y + dy, h as i64), mirror(x + dx, w as i64)) as f64 / 255.0;
                    gx += hx[(dy + r) as usize][(dx + r) as usize] * v;
                    gy += hy[(dy + r) as usize][(dx + r) as usize] * v;
                }
            }
            out[y as usize * w + x as usize] = (gx * gx + gy * gy).sqrt();
        }
    }
    out
}

/// Gradient error by direct 2-D convolution, summed, ×10⁻³.
pub fn direct_grad(pred: &AlphaMatte, gt: &AlphaMatte, region: Option<&Mask>, sigma: f64) -> f64 {
    let mp = direct_magnitude(pred, sigma);
    let mg = direct_magnitude(gt, sigma);
    let mut sum = 0.0;
    for i in 0..mp.len() {
        if in_region(region, i) {
            sum += (mp[i] - mg[i]).powi(2);
        }
    }
    sum * 1e-3
}

/// Connectivity error by exhaustive sweep: for each of the ten thresholds,
/// label the joint level set and test every pixel against the source region.
/// `None` when the mattes share no fully opaque pixel.
pub fn exhaustive_conn(pred: &AlphaMatte, gt: &AlphaMatte, region: Option<&Mask>) -> Option<f64> {
    let (w, h) = gt.dims();
    let (p, g) = (pred.as_slice(), gt.as_slice());
    let n = p.len();
    let opaque: Vec<bool> = (0..n).map(|i| p[i] == 255 && g[i] == 255).collect();
    let roots = components(&opaque, w, h, false);
    let mut sizes: std::collections::BTreeMap<usize, (usize, usize)> = Default::default();
    for (i, root) in roots.iter().enumerate() {
        if let Some(r) = *root {
            let e = sizes.entry(r).or_insert((0, i));
            e.0 += 1;
            e.1 = e.1.min(i);
        }
    }
    let (_, &(_, anchor)) = sizes
        .iter()
        .max_by(|a, b| a.1 .0.cmp(&b.1 .0).then(b.1 .1.cmp(&a.1 .1)))?;

    let mut level = vec![0.0; n];
    for k in 1..=10u32 {
        let t = k as f64 / 10.0;
        let set: Vec<bool> = (0..n)
            .map(|i| p[i] as u32 * 10 >= 255 * k && g[i] as u32 * 10 >= 255 * k)
            .collect();
        let comp = components(&set, w, h, false);
        for i in 0..n {
            if comp[i].is_some() && comp[i] == comp[anchor] {
                level[i] = f64::max(level[i], t);
            }
        }
    }
    let phi = |v: u8, l: f64| {
        let d = v as f64 / 255.0 - l;
        if d >= 0.15 {
            1.0 - d
        } else {
            1.0
        }
    };
    let mut sum = 0.0;
    for i in 0..n {
        if in_region(region, i) {
            sum += (phi(p[i], level[i]) - phi(g[i], level[i])).abs();
        }
    }
    Some(sum * 1e-3)
}

pub fn rel_close(a: f64, b: f64, tol: f64) -> bool {
    let diff = (a - b).abs();
    diff <= tol * a.abs().max(b.abs()) || diff <= 1e-18
}

/// Trimap by direct disc scan: a pixel is sure foreground when every disc
/// offset `dy² + dx² <= r²` lands inside the image on an opaque pixel, and
/// sure background when every in-image disc pixel is fully transparent.
pub fn naive_trimap(alpha: &AlphaMatte, fg_radius: usize, bg_radius: usize) -> Vec<u8> {
    let (w, h) = alpha.dims();
    let all_within = |r: usize, c: usize, radius: usize, want: u8, edge_ok: bool| {
        let rad = radius as i64;
        for dy in -rad..=rad {
            for dx in -rad..=rad {
                if dy * dy + dx * dx > rad * rad {
                    continue;
                }
                let (y, x) = (r as i64 + dy, c as i64 + dx);
                if y < 0 || x < 0 || y >= h as i64 || x >= w as i64 {
                    if !edge_ok {
                        return false;
                    }
                } else if alpha.get(y as usize, x as usize) != want {
                    return false;
                }
            }
        }
        true
    };
    let mut out = vec![128u8; w * h];
    for r in 0..h {
        for c in 0..w {
            if all_within(r, c, fg_radius, 255, false) {
                out[r * w + c] = 255;
            } else if all_within(r, c, bg_radius, 0, true) {
                out[r * w + c] = 0;
            }
        }
    }
    out
}
