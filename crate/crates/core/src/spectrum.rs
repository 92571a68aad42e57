//! Automorphism structure of a binary tree: how many tree automorphisms
//! have each cycle type when acting on the leaves.
//!
//! Every automorphism of a binary tree has cycle lengths that are powers of
//! two, so the spectrum is indexed by binary partitions. The recursion at a
//! node with identical branches splits automorphisms into branch-preserving
//! pairs and branch-swapping elements; a swapping element squares into the
//! branches, doubling every cycle of the square's restriction.

use std::collections::BTreeMap;
use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use num::{BigUint, One};
use once_cell::sync::Lazy;

use crate::caps::Caps;
use crate::error::{Error, Result};
use crate::partition::{pid_double, pid_of, pid_union, partition_of, BinaryPartition, Pid};
use crate::tree::CanonicalTree;

/// Counts of automorphisms by leaf cycle type. Entries are sorted with the
/// largest-part-first type last; counts sum to the automorphism group size.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CycleSpectrum {
    entries: Vec<(BinaryPartition, u64)>,
}

impl CycleSpectrum {
    pub fn entries(&self) -> &[(BinaryPartition, u64)] {
        &self.entries
    }

    pub fn count_for(&self, lambda: &BinaryPartition) -> u64 {
        self.entries
            .iter()
            .find(|(p, _)| p == lambda)
            .map_or(0, |(_, c)| *c)
    }

    pub fn total(&self) -> BigUint {
        self.entries.iter().map(|(_, c)| BigUint::from(*c)).sum()
    }
}

/// |A(T)| = 2^generators.
pub fn aut_size(t: &CanonicalTree) -> BigUint {
    BigUint::one() << t.generators() as u64
}

// Counts fit u64 exactly while |A(T)| <= 2^63, i.e. up to 64 leaves.
const SPECTRUM_HARD_LIMIT: u64 = 64;

/// Cycle spectrum of the automorphism group of `t` acting on the leaves.
pub fn cycle_spectrum(t: &CanonicalTree, caps: &Caps) -> Result<CycleSpectrum> {
    let n = t.leaves();
    if n > caps.spectrum_leaves as u64 {
        return Err(Error::resource("spectrum leaves", n, caps.spectrum_leaves));
    }
    if n > SPECTRUM_HARD_LIMIT {
        return Err(Error::Domain(format!(
            "cycle counts overflow u64 beyond {SPECTRUM_HARD_LIMIT} leaves (got {n})"
        )));
    }
    let pids = spectrum_pids(t);
    let mut entries: Vec<(BinaryPartition, u64)> = pids
        .iter()
        .map(|&(p, c)| (partition_of(p), c))
        .collect();
    entries.sort_by(|a, b| a.0.cmp(&b.0));
    Ok(CycleSpectrum { entries })
}

static SPECTRA: Lazy<Mutex<HashMap<u64, Arc<Vec<(Pid, u64)>>>>> =
    Lazy::new(|| Mutex::new(HashMap::new()));

/// Memoized spectrum keyed by interned tree id; entries sorted by pid.
pub(crate) fn spectrum_pids(t: &CanonicalTree) -> Arc<Vec<(Pid, u64)>> {
    assert!(
        t.leaves() <= SPECTRUM_HARD_LIMIT,
        "cycle counts overflow u64 beyond {SPECTRUM_HARD_LIMIT} leaves"
    );
    if let Some(s) = SPECTRA.lock().unwrap().get(&t.uid()) {
        return s.clone();
    }
    let result = match t.children() {
        None => {
            let unit = pid_of(&BinaryPartition::unit());
            Arc::new(vec![(unit, 1u64)])
        }
        Some((a, b)) => {
            let sa = spectrum_pids(a);
            let sb = spectrum_pids(b);
            let mut acc: BTreeMap<Pid, u64> = BTreeMap::new();
            for &(pa, ca) in sa.iter() {
                for &(pb, cb) in sb.iter() {
                    *acc.entry(pid_union(pa, pb)).or_insert(0) += ca * cb;
                }
            }
            if a == b {
                // Branch-swapping automorphisms: one per (element of A(a),
                // target square); the swap doubles every cycle of the square.
                let aut_a = 1u64 << a.generators();
                for &(pa, ca) in sa.iter() {
                    *acc.entry(pid_double(pa)).or_insert(0) += aut_a * ca;
                }
            }
            Arc::new(acc.into_iter().collect::<Vec<_>>())
        }
    };
    SPECTRA
        .lock()
        .unwrap()
        .entry(t.uid())
        .or_insert(result)
        .clone()
}

static INVOLUTIONS: Lazy<Mutex<HashMap<u64, Arc<Vec<BigUint>>>>> =
    Lazy::new(|| Mutex::new(HashMap::new()));

/// Involution counts: entry s is the number of automorphisms of `t` whose
/// leaf action consists of s transpositions and fixed points elsewhere
/// (entry 0 counts the identity). Works at any size; counts are exact.
pub fn involution_counts(t: &CanonicalTree) -> Arc<Vec<BigUint>> {
    if let Some(p) = INVOLUTIONS.lock().unwrap().get(&t.uid()) {
        return p.clone();
    }
    let result = match t.children() {
        None => Arc::new(vec![BigUint::one()]),
        Some((a, b)) => {
            let pa = involution_counts(a);
            let pb = involution_counts(b);
            let mut coeffs = vec![BigUint::default(); pa.len() + pb.len() - 1];
            for (i, ca) in pa.iter().enumerate() {
                for (j, cb) in pb.iter().enumerate() {
                    coeffs[i + j] += ca * cb;
                }
            }
            if a == b {
                // A swapping involution must square to the identity; there
                // are |A(a)| of them, each pairing all leaves across.
                let s = a.leaves() as usize;
                if coeffs.len() < s + 1 {
                    coeffs.resize(s + 1, BigUint::default());
                }
                coeffs[s] += aut_size(a);
            }
            Arc::new(coeffs)
        }
    };
    INVOLUTIONS
        .lock()
        .unwrap()
        .entry(t.uid())
        .or_insert(result)
        .clone()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tree::{canonicalize, enumerate_canonical_trees, enumerate_plane_trees};
    use num::Zero;

    fn spectrum_map(t: &CanonicalTree) -> BTreeMap<String, u64> {
        cycle_spectrum(t, &Caps::default())
            .unwrap()
            .entries()
            .iter()
            .map(|(p, c)| (p.to_string(), *c))
            .collect()
    }

    #[test]
    fn leaf_spectrum_is_trivial() {
        let leaf = CanonicalTree::leaf();
        let m = spectrum_map(&leaf);
        assert_eq!(m.len(), 1);
        assert_eq!(m["1"], 1);
    }

    #[test]
    fn cherry_spectrum() {
        let cherry: CanonicalTree = "(L,L)".parse().unwrap();
        let m = spectrum_map(&cherry);
        assert_eq!(m["1,1"], 1);
        assert_eq!(m["2"], 1);
        assert_eq!(m.len(), 2);
    }

    #[test]
    fn complete_four_spectrum_by_hand() {
        let t: CanonicalTree = "((L,L),(L,L))".parse().unwrap();
        let m = spectrum_map(&t);
        assert_eq!(m["1,1,1,1"], 1);
        assert_eq!(m["2,1,1"], 2);
        assert_eq!(m["2,2"], 3);
        assert_eq!(m["4"], 2);
        assert_eq!(m.len(), 4);
    }

    #[test]
    fn caterpillar_four_spectrum_by_hand() {
        let t: CanonicalTree = "(L,(L,(L,L)))".parse().unwrap();
        let m = spectrum_map(&t);
        assert_eq!(m["1,1,1,1"], 1);
        assert_eq!(m["2,1,1"], 1);
        assert_eq!(m.len(), 2);
    }

    #[test]
    fn spectrum_totals_equal_group_size() {
        let caps = Caps::default();
        for n in 1..=11 {
            for t in enumerate_canonical_trees(n, &caps).unwrap().iter() {
                let s = cycle_spectrum(t, &caps).unwrap();
                assert_eq!(s.total(), aut_size(t), "tree {t}");
            }
        }
    }

    #[test]
    fn identity_type_appears_exactly_once() {
        let caps = Caps::default();
        let all_ones: Vec<u64> = vec![1; 9];
        let lam = BinaryPartition::from_parts(&all_ones).unwrap();
        for t in enumerate_canonical_trees(9, &caps).unwrap().iter() {
            let s = cycle_spectrum(t, &caps).unwrap();
            assert_eq!(s.count_for(&lam), 1, "tree {t}");
        }
    }

    #[test]
    fn spectrum_is_embedding_invariant() {
        let caps = Caps::default();
        for t in enumerate_plane_trees(6, &caps).unwrap() {
            let c = canonicalize(&t);
            let direct = spectrum_map(&c);
            let mirrored = match t.children() {
                Some((l, r)) => {
                    canonicalize(&crate::tree::PlaneTree::node(r.clone(), l.clone()))
                }
                None => c.clone(),
            };
            assert_eq!(direct, spectrum_map(&mirrored));
        }
    }

    #[test]
    fn involution_counts_match_spectrum() {
        let caps = Caps::default();
        for n in 1..=12u64 {
            for t in enumerate_canonical_trees(n, &caps).unwrap().iter() {
                let poly = involution_counts(t);
                let spec = cycle_spectrum(t, &caps).unwrap();
                for (s, coeff) in poly.iter().enumerate() {
                    if 2 * (s as u64) > n {
                        assert!(coeff.is_zero());
                        continue;
                    }
                    let lam = BinaryPartition::mu(s as u64, n).unwrap();
                    assert_eq!(
                        BigUint::from(spec.count_for(&lam)),
                        coeff.clone(),
                        "tree {t}, s = {s}"
                    );
                }
                // Types with a part >= 4 never contribute to the counts.
                let poly_total: BigUint = poly.iter().sum();
                let restricted_total: BigUint = spec
                    .entries()
                    .iter()
                    .filter(|(p, _)| p.is_restricted())
                    .map(|(_, c)| BigUint::from(*c))
                    .sum();
                assert_eq!(poly_total, restricted_total);
            }
        }
    }

    #[test]
    fn single_transposition_count_is_the_cherry_count() {
        let caps = Caps::default();
        for n in 2..=12 {
            for t in enumerate_canonical_trees(n, &caps).unwrap().iter() {
                let poly = involution_counts(t);
                let ones = poly.get(1).cloned().unwrap_or_default();
                assert_eq!(ones, BigUint::from(t.cherries()), "tree {t}");
            }
        }
    }

    #[test]
    fn involution_counts_within_binomial_bounds() {
        // binom(c, s) <= count <= binom(c + s - 1, s), and |A| <= 2^(2c-1).
        let caps = Caps::default();
        for n in 2..=12 {
            for t in enumerate_canonical_trees(n, &caps).unwrap().iter() {
                let c = u64::from(t.cherries());
                assert!(u64::from(t.generators()) <= 2 * c - 1, "tree {t}");
                let poly = involution_counts(t);
                for (s, coeff) in poly.iter().enumerate() {
                    let s = s as u64;
                    assert!(coeff >= &binom(c, s), "tree {t}, s = {s}");
                    assert!(coeff <= &binom(c + s.saturating_sub(1), s), "tree {t}, s = {s}");
                }
            }
        }
    }

    #[test]
    fn spectrum_rejects_oversized_input() {
        let caps = Caps {
            spectrum_leaves: 4,
            ..Caps::default()
        };
        let t: CanonicalTree = "(L,(L,(L,(L,L))))".parse().unwrap();
        assert!(matches!(
            cycle_spectrum(&t, &caps),
            Err(Error::ResourceLimit { .. })
        ));
    }

    fn binom(n: u64, k: u64) -> BigUint {
        if k > n {
            return BigUint::zero();
        }
        let mut num = BigUint::one();
        for i in 0..k {
            num = num * BigUint::from(n - i) / BigUint::from(i + 1);
        }
        num
    }
}
