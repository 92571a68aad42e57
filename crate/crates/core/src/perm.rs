//! Permutations of leaf labels, stored 0-based, printed 1-based.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// A permutation of {0, .., n-1}. `images[i]` is the image of `i`.
///
/// Composition is function composition: `(p * q)(x) = p(q(x))`, i.e. `q`
/// acts first. The textual form is the 1-based image list `2,1,4,3`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Perm {
    images: Vec<u32>,
}

impl Perm {
    pub fn identity(n: usize) -> Perm {
        Perm {
            images: (0..n as u32).collect(),
        }
    }

    /// Build from 0-based images, validating bijectivity.
    pub fn from_images(images: Vec<u32>) -> Result<Perm> {
        let n = images.len();
        let mut seen = vec![false; n];
        for &v in &images {
            let v = v as usize;
            if v >= n || seen[v] {
                return Err(Error::Domain(format!(
                    "image list of length {n} is not a permutation"
                )));
            }
            seen[v] = true;
        }
        Ok(Perm { images })
    }

    pub fn len(&self) -> usize {
        self.images.len()
    }

    pub fn is_empty(&self) -> bool {
        self.images.is_empty()
    }

    pub fn is_identity(&self) -> bool {
        self.images.iter().enumerate().all(|(i, &v)| i as u32 == v)
    }

    pub fn apply(&self, i: usize) -> usize {
        self.images[i] as usize
    }

    pub fn images(&self) -> &[u32] {
        &self.images
    }

    /// `self` after `other`: `(self.compose(other))(x) = self(other(x))`.
    pub fn compose(&self, other: &Perm) -> Perm {
        debug_assert_eq!(self.len(), other.len());
        Perm {
            images: other.images.iter().map(|&x| self.images[x as usize]).collect(),
        }
    }

    pub fn inverse(&self) -> Perm {
        let mut images = vec![0u32; self.len()];
        for (i, &v) in self.images.iter().enumerate() {
            images[v as usize] = i as u32;
        }
        Perm { images }
    }

    /// Cycle decomposition; each cycle lists elements in traversal order
    /// starting from its smallest element, cycles sorted by that element.
    pub fn cycles(&self) -> Vec<Vec<u32>> {
        let n = self.len();
        let mut seen = vec![false; n];
        let mut out = Vec::new();
        for start in 0..n {
            if seen[start] {
                continue;
            }
            let mut cycle = Vec::new();
            let mut x = start;
            while !seen[x] {
                seen[x] = true;
                cycle.push(x as u32);
                x = self.apply(x);
            }
            out.push(cycle);
        }
        out
    }

    /// Cycle lengths, weakly decreasing.
    pub fn cycle_type(&self) -> Vec<u64> {
        let mut lens: Vec<u64> = self.cycles().iter().map(|c| c.len() as u64).collect();
        lens.sort_unstable_by(|a, b| b.cmp(a));
        lens
    }
}

impl fmt::Display for Perm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, v) in self.images.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{}", v + 1)?;
        }
        Ok(())
    }
}

impl FromStr for Perm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Perm> {
        let mut images = Vec::new();
        let mut offset = 0usize;
        for field in s.split(',') {
            let trimmed = field.trim();
            let v: u64 = trimmed
                .parse()
                .map_err(|_| Error::parse(offset, format!("expected integer, found {trimmed:?}")))?;
            if v == 0 {
                return Err(Error::parse(offset, "labels are 1-based"));
            }
            images.push((v - 1) as u32);
            offset += field.len() + 1;
        }
        Perm::from_images(images)
    }
}

/// Iterator over all permutations of `{0, .., n-1}` in lexicographic order.
///
/// Intended for exhaustive small-n searches; the caller is responsible for
/// keeping `n!` tractable.
pub struct Permutations {
    next: Option<Vec<u32>>,
}

impl Permutations {
    pub fn new(n: usize) -> Permutations {
        Permutations {
            next: Some((0..n as u32).collect()),
        }
    }
}

impl Iterator for Permutations {
    type Item = Perm;

    fn next(&mut self) -> Option<Perm> {
        let current = self.next.take()?;
        let mut succ = current.clone();
        // Standard next-permutation step; `None` once the sequence is descending.
        let pivot = succ.windows(2).rposition(|w| w[0] < w[1]);
        if let Some(i) = pivot {
            let j = succ.iter().rposition(|&v| v > succ[i]).unwrap();
            succ.swap(i, j);
            succ[i + 1..].reverse();
            self.next = Some(succ);
        }
        Some(Perm { images: current })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn permutations_enumerate_all() {
        let all: Vec<Perm> = Permutations::new(3).collect();
        assert_eq!(all.len(), 6);
        assert_eq!(all[0], Perm::identity(3));
        assert_eq!(all[5].images(), &[2, 1, 0]);
        let distinct: std::collections::HashSet<Vec<u32>> =
            all.iter().map(|p| p.images().to_vec()).collect();
        assert_eq!(distinct.len(), 6);
        assert_eq!(Permutations::new(5).count(), 120);
        assert_eq!(Permutations::new(1).count(), 1);
        assert_eq!(Permutations::new(0).count(), 1);
    }

    #[test]
    fn compose_applies_right_factor_first() {
        // p = (1 2) on {0,1,2}, q = (0 1).
        let p = Perm::from_images(vec![0, 2, 1]).unwrap();
        let q = Perm::from_images(vec![1, 0, 2]).unwrap();
        let pq = p.compose(&q);
        // x=0: q->1, p->2.
        assert_eq!(pq.apply(0), 2);
        assert_eq!(pq.apply(1), 0);
        assert_eq!(pq.apply(2), 1);
    }

    #[test]
    fn inverse_round_trips() {
        let p = Perm::from_images(vec![2, 0, 3, 1]).unwrap();
        assert!(p.compose(&p.inverse()).is_identity());
        assert!(p.inverse().compose(&p).is_identity());
    }

    #[test]
    fn cycle_type_is_sorted_desc() {
        let p = Perm::from_images(vec![1, 0, 3, 4, 2]).unwrap();
        assert_eq!(p.cycle_type(), vec![3, 2]);
    }

    #[test]
    fn display_and_parse_are_one_based() {
        let p: Perm = "2,1,4,3".parse().unwrap();
        assert_eq!(p.images(), &[1, 0, 3, 2]);
        assert_eq!(p.to_string(), "2,1,4,3");
        assert!("0,1".parse::<Perm>().is_err());
        assert!("2,2".parse::<Perm>().is_err());
        assert!("a,b".parse::<Perm>().is_err());
    }

    #[test]
    fn rejects_non_permutations() {
        assert!(Perm::from_images(vec![0, 0]).is_err());
        assert!(Perm::from_images(vec![5]).is_err());
    }
}
