//! Deterministic randomness for the samplers.
//!
//! All category draws go through 128-bit inverse-CDF selection: a category
//! with cumulative bounds (lo, hi] out of total W is chosen iff
//! floor(r * W / 2^128) lands in [lo, hi), where r is a uniform 128-bit
//! word. Comparing against floor(r * W / 2^128) is exactly equivalent to
//! comparing r * W against the scaled bounds, so the selection is
//! rejection-free, uses one draw, and its per-category bias is below
//! 2^-128. That keeps every sampler deterministic in (seed, stream) with no
//! data-dependent retry loops.

use num::BigUint;
use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha12Rng;

/// Seeded stream generator; cheap to clone, stable across platforms.
#[derive(Debug, Clone)]
pub struct Rng(ChaCha12Rng);

impl Rng {
    pub fn new(seed: u64) -> Rng {
        Rng(ChaCha12Rng::seed_from_u64(seed))
    }

    /// Independent stream for parallel work under one seed.
    pub fn with_stream(seed: u64, stream: u64) -> Rng {
        let mut inner = ChaCha12Rng::seed_from_u64(seed);
        inner.set_stream(stream);
        Rng(inner)
    }

    pub fn next_u64(&mut self) -> u64 {
        self.0.next_u64()
    }

    /// Low word drawn first.
    pub fn next_u128(&mut self) -> u128 {
        let lo = self.0.next_u64() as u128;
        let hi = self.0.next_u64() as u128;
        (hi << 64) | lo
    }

    /// Uniform index in 0..m.
    pub fn index(&mut self, m: u64) -> u64 {
        assert!(m > 0, "empty range");
        mulhi_u128(self.next_u128(), m as u128) as u64
    }

    pub fn coin(&mut self) -> bool {
        self.0.next_u64() & 1 == 1
    }

    /// Fisher-Yates.
    pub fn shuffle<T>(&mut self, xs: &mut [T]) {
        for i in (1..xs.len()).rev() {
            let j = self.index(i as u64 + 1) as usize;
            xs.swap(i, j);
        }
    }

    /// Pick a category from a nondecreasing cumulative-weight table; the
    /// last entry is the total. Zero-weight categories are unselectable.
    pub fn choose_cum_u64(&mut self, cum: &[u64]) -> usize {
        let total = *cum.last().expect("empty cumulative table");
        assert!(total > 0, "all-zero cumulative table");
        let threshold = mulhi_u128(self.next_u128(), total as u128) as u64;
        cum.partition_point(|&c| c <= threshold)
    }

    /// Same selection with arbitrary-precision weights.
    pub fn choose_cum_big(&mut self, cum: &[BigUint]) -> usize {
        let total = cum.last().expect("empty cumulative table");
        assert!(total > &BigUint::default(), "all-zero cumulative table");
        let threshold = (BigUint::from(self.next_u128()) * total) >> 128;
        cum.partition_point(|c| c <= &threshold)
    }
}

/// High 128 bits of the 256-bit product a * b.
pub fn mulhi_u128(a: u128, b: u128) -> u128 {
    let (a_lo, a_hi) = (a as u64 as u128, a >> 64);
    let (b_lo, b_hi) = (b as u64 as u128, b >> 64);
    let ll = a_lo * b_lo;
    let lh = a_lo * b_hi;
    let hl = a_hi * b_lo;
    let hh = a_hi * b_hi;
    // Carry out of the middle 128-bit column.
    let mid = (ll >> 64) + (lh as u64 as u128) + (hl as u64 as u128);
    hh + (lh >> 64) + (hl >> 64) + (mid >> 64)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mulhi_agrees_with_wide_arithmetic() {
        assert_eq!(mulhi_u128(0, u128::MAX), 0);
        assert_eq!(mulhi_u128(1 << 127, 2), 1);
        assert_eq!(mulhi_u128(u128::MAX, u128::MAX), u128::MAX - 1);
        let cases = [
            (3u128, u128::MAX / 2),
            (u128::MAX, 7),
            ((1 << 100) + 12345, (1 << 90) + 999),
        ];
        for (a, b) in cases {
            let wide = (BigUint::from(a) * BigUint::from(b)) >> 128;
            assert_eq!(BigUint::from(mulhi_u128(a, b)), wide);
        }
    }

    #[test]
    fn same_seed_same_stream_reproduces() {
        let mut a = Rng::with_stream(42, 3);
        let mut b = Rng::with_stream(42, 3);
        for _ in 0..100 {
            assert_eq!(a.next_u64(), b.next_u64());
        }
    }

    #[test]
    fn streams_differ() {
        let mut a = Rng::with_stream(42, 0);
        let mut b = Rng::with_stream(42, 1);
        let same = (0..64).filter(|_| a.next_u64() == b.next_u64()).count();
        assert!(same < 4);
    }

    #[test]
    fn index_stays_in_range_and_hits_everything() {
        let mut rng = Rng::new(7);
        let mut seen = [false; 10];
        for _ in 0..1000 {
            let i = rng.index(10);
            assert!(i < 10);
            seen[i as usize] = true;
        }
        assert!(seen.iter().all(|&s| s));
    }

    #[test]
    fn choose_cum_skips_zero_weight_categories() {
        let mut rng = Rng::new(11);
        let cum = [2u64, 2, 5, 5, 9];
        let mut hits = [0u32; 5];
        for _ in 0..2000 {
            hits[rng.choose_cum_u64(&cum)] += 1;
        }
        assert_eq!(hits[1], 0);
        assert_eq!(hits[3], 0);
        assert!(hits[0] > 0 && hits[2] > 0 && hits[4] > 0);
        // Weights 2:3:4 should roughly shape the counts.
        assert!(hits[2] > hits[0]);
        assert!(hits[4] > hits[2]);
    }

    #[test]
    fn big_and_small_cumulative_selection_agree() {
        let cum_small = [5u64, 7, 19, 40];
        let cum_big: Vec<BigUint> = cum_small.iter().map(|&c| BigUint::from(c)).collect();
        let mut a = Rng::new(99);
        let mut b = Rng::new(99);
        for _ in 0..500 {
            assert_eq!(a.choose_cum_u64(&cum_small), b.choose_cum_big(&cum_big));
        }
    }

    #[test]
    fn shuffle_is_a_permutation_and_deterministic() {
        let mut rng = Rng::new(5);
        let mut xs: Vec<u32> = (0..20).collect();
        rng.shuffle(&mut xs);
        let mut sorted = xs.clone();
        sorted.sort_unstable();
        assert_eq!(sorted, (0..20).collect::<Vec<_>>());

        let mut rng2 = Rng::new(5);
        let mut ys: Vec<u32> = (0..20).collect();
        rng2.shuffle(&mut ys);
        assert_eq!(xs, ys);
    }
}
