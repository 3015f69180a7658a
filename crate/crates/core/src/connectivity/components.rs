use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use crate::error::{MatteError, Result};
use crate::image::{ensure_same, AlphaMatte, InverseAlpha, Mask};

/// Pixel adjacency used when growing regions.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Connectivity {
    /// Edge-sharing neighbours only.
    Four,
    /// Edge- and corner-sharing neighbours.
    Eight,
}

const FOUR: [(isize, isize); 4] = [(-1, 0), (0, -1), (0, 1), (1, 0)];
const EIGHT: [(isize, isize); 8] = [
    (-1, -1),
    (-1, 0),
    (-1, 1),
    (0, -1),
    (0, 1),
    (1, -1),
    (1, 0),
    (1, 1),
];

impl Connectivity {
    pub fn offsets(self) -> &'static [(isize, isize)] {
        match self {
            Connectivity::Four => &FOUR,
            Connectivity::Eight => &EIGHT,
        }
    }
}

/// Calls `f` with the flat index of every in-bounds neighbour of `index`.
#[inline]
pub(crate) fn for_each_neighbor(
    index: usize,
    width: usize,
    height: usize,
    connectivity: Connectivity,
    mut f: impl FnMut(usize),
) {
    let (row, col) = (index / width, index % width);
    for &(dr, dc) in connectivity.offsets() {
        let r = row as isize + dr;
        let c = col as isize + dc;
        if r >= 0 && c >= 0 && (r as usize) < height && (c as usize) < width {
            f(r as usize * width + c as usize);
        }
    }
}

/// Labeled connected regions of a binary grid. Label 0 means unlabeled;
/// regions are numbered from 1 in discovery order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RegionSet {
    width: usize,
    height: usize,
    connectivity: Connectivity,
    labels: Vec<u32>,
    sizes: Vec<usize>,
}

impl RegionSet {
    pub fn empty(width: usize, height: usize, connectivity: Connectivity) -> Self {
        Self {
            width,
            height,
            connectivity,
            labels: vec![0; width * height],
            sizes: Vec::new(),
        }
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.width, self.height)
    }

    pub fn connectivity(&self) -> Connectivity {
        self.connectivity
    }

    pub fn label_map(&self) -> &[u32] {
        &self.labels
    }

    pub fn region_count(&self) -> usize {
        self.sizes.len()
    }

    /// Pixel count per region; entry `i` belongs to label `i + 1`.
    pub fn region_sizes(&self) -> &[usize] {
        &self.sizes
    }

    pub fn label(&self, row: usize, col: usize) -> u32 {
        self.labels[row * self.width + col]
    }

    pub fn contains_index(&self, index: usize) -> bool {
        self.labels[index] != 0
    }

    pub fn contains(&self, row: usize, col: usize) -> bool {
        self.label(row, col) != 0
    }

    pub fn labeled_count(&self) -> usize {
        self.sizes.iter().sum()
    }

    pub fn to_mask(&self) -> Mask {
        let data = self.labels.iter().map(|&l| l != 0).collect();
        Mask::new(self.width, self.height, data).expect("label map has valid dimensions")
    }

    /// Flood-fills from `start` through pixels accepted by `passable`, giving
    /// them a fresh label. Returns the new label, or `None` if `start` is
    /// already labeled.
    pub(crate) fn grow_from(
        &mut self,
        start: usize,
        queue: &mut VecDeque<usize>,
        passable: impl Fn(usize) -> bool,
    ) -> Option<u32> {
        if self.labels[start] != 0 {
            return None;
        }
        let label = u32::try_from(self.sizes.len() + 1).expect("region count fits in u32");
        let (w, h, conn) = (self.width, self.height, self.connectivity);
        self.labels[start] = label;
        queue.clear();
        queue.push_back(start);
        let mut size = 0usize;
        while let Some(idx) = queue.pop_front() {
            size += 1;
            for_each_neighbor(idx, w, h, conn, |n| {
                if self.labels[n] == 0 && passable(n) {
                    self.labels[n] = label;
                    queue.push_back(n);
                }
            });
        }
        self.sizes.push(size);
        Some(label)
    }
}

/// Labels the set pixels of `mask`; two pixels share a label iff a path of set
/// pixels joins them under `connectivity`.
pub fn connected_components(mask: &Mask, connectivity: Connectivity) -> RegionSet {
    let (w, h) = mask.dims();
    let mut regions = RegionSet::empty(w, h, connectivity);
    let data = mask.as_slice();
    let mut queue = VecDeque::new();
    for start in 0..data.len() {
        if data[start] {
            regions.grow_from(start, &mut queue, |i| data[i]);
        }
    }
    regions
}

/// 4-connected regions of fully transparent pixels.
pub fn background_regions(alpha: &AlphaMatte) -> RegionSet {
    let data = alpha.as_slice().iter().map(|&v| v == 0).collect();
    let mask = Mask::new(alpha.width(), alpha.height(), data).expect("matte has valid dimensions");
    connected_components(&mask, Connectivity::Four)
}

/// Pixel coordinates `(row, col)`, in bounds and free of duplicates.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SeedSet {
    points: Vec<(usize, usize)>,
}

impl SeedSet {
    /// Validates bounds against `dims` (width, height) and drops repeats,
    /// keeping first occurrences in order.
    pub fn new(points: Vec<(usize, usize)>, dims: (usize, usize)) -> Result<Self> {
        let (w, h) = dims;
        let mut seen = vec![false; w * h];
        let mut kept = Vec::with_capacity(points.len());
        for (row, col) in points {
            if row >= h || col >= w {
                return Err(MatteError::InvalidSeed { row, col });
            }
            let idx = row * w + col;
            if !seen[idx] {
                seen[idx] = true;
                kept.push((row, col));
            }
        }
        Ok(Self { points: kept })
    }

    pub fn points(&self) -> &[(usize, usize)] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// Every semi-transparent pixel that is 8-adjacent to a labeled background
/// pixel, in row-major order.
pub fn edge_seed_points(inv: &InverseAlpha, bg: &RegionSet) -> Result<SeedSet> {
    ensure_same(inv.dims(), bg.dims())?;
    let (w, h) = inv.dims();
    let semi = inv.mask().as_slice();
    let mut points = Vec::new();
    for (idx, _) in semi.iter().enumerate().filter(|(_, &s)| s) {
        let mut touches = false;
        for_each_neighbor(idx, w, h, Connectivity::Eight, |n| touches |= bg.contains_index(n));
        if touches {
            points.push((idx / w, idx % w));
        }
    }
    Ok(SeedSet { points })
}

/// Grows 8-connected semi-transparent regions from the seeds. Each grown
/// component gets its own label, numbered in seed order.
pub fn grow_semitransparent(inv: &InverseAlpha, seeds: &SeedSet) -> Result<RegionSet> {
    let (w, h) = inv.dims();
    let semi = inv.mask().as_slice();
    let mut regions = RegionSet::empty(w, h, Connectivity::Eight);
    let mut queue = VecDeque::new();
    for &(row, col) in seeds.points() {
        if row >= h || col >= w || !semi[row * w + col] {
            return Err(MatteError::InvalidSeed { row, col });
        }
        regions.grow_from(row * w + col, &mut queue, |i| semi[i]);
    }
    Ok(regions)
}
