//! Seeded randomness.
//!
//! Every random choice in the pipeline comes from ChaCha8 seeded with
//! `seed_from_u64`. Integers in `0..n` are drawn as `next_u64() % n`; the
//! modulo bias is far below anything observable at dataset scale and keeps
//! the stream easy to reproduce elsewhere.

use std::collections::HashMap;

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

pub struct PipelineRng(ChaCha8Rng);

impl PipelineRng {
    pub fn new(seed: u64) -> Self {
        Self(ChaCha8Rng::seed_from_u64(seed))
    }

    /// Uniform index in `0..n`. `n` must be positive.
    pub fn below(&mut self, n: u64) -> u64 {
        self.0.next_u64() % n
    }

    /// Fisher-Yates shuffle walking down from the last element.
    pub fn shuffle<T>(&mut self, items: &mut [T]) {
        for i in (1..items.len()).rev() {
            let j = self.below(i as u64 + 1) as usize;
            items.swap(i, j);
        }
    }

    /// First `k` entries of a forward Fisher-Yates pass over `0..n`, without
    /// materializing the range.
    pub fn sample_indices(&mut self, n: u64, k: u64) -> Vec<u64> {
        let k = k.min(n);
        let mut swapped: HashMap<u64, u64> = HashMap::new();
        let mut out = Vec::with_capacity(k as usize);
        for i in 0..k {
            let j = i + self.below(n - i);
            let vi = *swapped.get(&i).unwrap_or(&i);
            let vj = *swapped.get(&j).unwrap_or(&j);
            swapped.insert(j, vi);
            out.push(vj);
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn streams_are_reproducible() {
        let a: Vec<u64> = (0..5).map({
            let mut r = PipelineRng::new(7);
            move |_| r.below(1000)
        })
        .collect();
        let mut r = PipelineRng::new(7);
        let b: Vec<u64> = (0..5).map(|_| r.below(1000)).collect();
        assert_eq!(a, b);
    }

    #[test]
    fn sampled_indices_are_distinct_and_cover_small_ranges() {
        let mut r = PipelineRng::new(3);
        let mut all = r.sample_indices(12, 100);
        assert_eq!(all.len(), 12);
        all.sort();
        assert_eq!(all, (0..12).collect::<Vec<_>>());
        let some = r.sample_indices(u64::MAX, 50);
        let set: std::collections::HashSet<_> = some.iter().collect();
        assert_eq!(set.len(), 50);
    }

    #[test]
    fn shuffle_is_a_permutation() {
        let mut v: Vec<u32> = (0..20).collect();
        PipelineRng::new(1).shuffle(&mut v);
        let mut s = v.clone();
        s.sort();
        assert_eq!(s, (0..20).collect::<Vec<_>>());
        assert_ne!(v, s);
    }
}
