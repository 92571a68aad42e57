//! Random generation: uniform plane trees (leaf-insertion growth on flat
//! arrays), an exact uniform tanglegram sampler, and a fast approximate
//! sampler from the product measure.
//!
//! The exact sampler is rejection-free. It draws, in order: a cycle type λ
//! with probability proportional to q(λ)²/z_λ, the left and right trees
//! with probability proportional to |A(T)_λ|·2^(n-1-g(T)), one automorphism
//! of type λ on each side, and finally a uniform conjugating matching. Over
//! all choices each tanglegram of size n comes out with probability exactly
//! 1/t_n: a matching m is produced once per automorphism pair it
//! stabilizes, which cancels the size of its equivalence class.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use num::BigUint;

use crate::caps::Caps;
use crate::error::{Error, Result};
use crate::measures::{ensemble, lambda_rows, Ensemble};
use crate::partition::{partition_of, pid_of, Pid};
use crate::perm::Perm;
use crate::rng::Rng;
use crate::spectrum::spectrum_pids;
use crate::tree::{canonicalize_with_leaf_perm, CanonicalTree, PlaneTree};

// ---------------------------------------------------------------------------
// Tanglegram
// ---------------------------------------------------------------------------

/// A tanglegram representative: two trees and a leaf matching. Leaves are
/// indexed by depth-first position in each tree's stored embedding; leaf i
/// of `left` is matched to leaf `matching(i)` of `right`. Two
/// representatives with the same trees describe the same tanglegram iff
/// their matchings differ by automorphisms on the two sides.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Tanglegram {
    left: CanonicalTree,
    matching: Perm,
    right: CanonicalTree,
}

impl Tanglegram {
    pub fn new(left: CanonicalTree, matching: Perm, right: CanonicalTree) -> Result<Tanglegram> {
        if left.leaves() != right.leaves() {
            return Err(Error::SizeMismatch {
                left: left.leaves() as usize,
                right: right.leaves() as usize,
            });
        }
        if matching.len() as u64 != left.leaves() {
            return Err(Error::Domain(format!(
                "matching on {} points cannot join trees with {} leaves",
                matching.len(),
                left.leaves()
            )));
        }
        Ok(Tanglegram {
            left,
            matching,
            right,
        })
    }

    pub fn n(&self) -> u64 {
        self.left.leaves()
    }

    pub fn left(&self) -> &CanonicalTree {
        &self.left
    }

    pub fn right(&self) -> &CanonicalTree {
        &self.right
    }

    pub fn matching(&self) -> &Perm {
        &self.matching
    }
}

impl fmt::Display for Tanglegram {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} ; {} ; {}", self.left, self.matching, self.right)
    }
}

impl FromStr for Tanglegram {
    type Err = Error;

    fn from_str(s: &str) -> Result<Tanglegram> {
        let parts: Vec<&str> = s.split(';').collect();
        if parts.len() != 3 {
            return Err(Error::parse(
                0,
                format!("expected 'tree ; matching ; tree', found {} fields", parts.len()),
            ));
        }
        let left: CanonicalTree = parts[0].trim().parse()?;
        let matching: Perm = parts[1].trim().parse()?;
        let right: CanonicalTree = parts[2].trim().parse()?;
        Tanglegram::new(left, matching, right)
    }
}

// ---------------------------------------------------------------------------
// Uniform plane trees
// ---------------------------------------------------------------------------

const NONE: u32 = u32::MAX;

/// Flat-array plane binary tree grown by uniform leaf insertion; node 2k+1
/// and 2k+2 are created at step k. Shape statistics run directly on the
/// arrays so bulk sampling never allocates per-node boxes.
pub(crate) struct RemyBuf {
    parent: Vec<u32>,
    children: Vec<[u32; 2]>,
    root: u32,
}

impl RemyBuf {
    /// Uniform over the C_n plane binary trees with n leaves: each growth
    /// step picks one of the 2k-1 nodes and a side, which corresponds
    /// bijectively to deleting one leaf of the larger tree.
    pub fn sample(n: u64, rng: &mut Rng) -> RemyBuf {
        assert!(n >= 1, "trees have at least one leaf");
        assert!(n <= (u32::MAX / 2) as u64, "node ids exceed u32");
        let size = 2 * n as usize - 1;
        let mut buf = RemyBuf {
            parent: vec![NONE; size],
            children: vec![[NONE, NONE]; size],
            root: 0,
        };
        let mut count = 1u32;
        for _ in 1..n {
            let v = rng.index(count as u64) as u32;
            let side = rng.coin() as usize;
            let w = count;
            let leaf = count + 1;
            count += 2;
            let p = buf.parent[v as usize];
            buf.parent[w as usize] = p;
            if p == NONE {
                buf.root = w;
            } else {
                let slot = if buf.children[p as usize][0] == v { 0 } else { 1 };
                buf.children[p as usize][slot] = w;
            }
            buf.children[w as usize] = if side == 0 { [leaf, v] } else { [v, leaf] };
            buf.parent[v as usize] = w;
            buf.parent[leaf as usize] = w;
        }
        buf
    }

    pub fn is_leaf(&self, v: u32) -> bool {
        self.children[v as usize][0] == NONE
    }

    pub fn n_leaves(&self) -> u64 {
        (self.children.len() as u64 + 1) / 2
    }

    pub fn height(&self) -> u32 {
        let mut best = 0;
        let mut stack = vec![(self.root, 0u32)];
        while let Some((v, d)) = stack.pop() {
            if self.is_leaf(v) {
                best = best.max(d);
            } else {
                let [a, b] = self.children[v as usize];
                stack.push((a, d + 1));
                stack.push((b, d + 1));
            }
        }
        best
    }

    #[cfg(test)]
    pub fn cherries(&self) -> u32 {
        let mut count = 0;
        for v in 0..self.children.len() {
            let [a, b] = self.children[v];
            if a != NONE && self.is_leaf(a) && self.is_leaf(b) {
                count += 1;
            }
        }
        count
    }

    /// Depth-first position of every leaf node (NONE entries for internal
    /// nodes).
    fn leaf_positions(&self) -> Vec<u32> {
        let mut pos = vec![NONE; self.children.len()];
        let mut next = 0u32;
        let mut stack = vec![self.root];
        while let Some(v) = stack.pop() {
            if self.is_leaf(v) {
                pos[v as usize] = next;
                next += 1;
            } else {
                let [a, b] = self.children[v as usize];
                stack.push(b);
                stack.push(a);
            }
        }
        pos
    }

    /// Depth-first leaf position pairs of the cherries.
    pub fn cherry_df_pairs(&self) -> Vec<(u32, u32)> {
        let pos = self.leaf_positions();
        let mut out = Vec::new();
        for v in 0..self.children.len() {
            let [a, b] = self.children[v];
            if a != NONE && self.is_leaf(a) && self.is_leaf(b) {
                out.push((pos[a as usize], pos[b as usize]));
            }
        }
        out
    }

    pub fn to_plane(&self) -> PlaneTree {
        let mut built: Vec<Option<PlaneTree>> = vec![None; self.children.len()];
        let mut stack = vec![self.root];
        while let Some(&v) = stack.last() {
            if self.is_leaf(v) {
                built[v as usize] = Some(PlaneTree::Leaf);
                stack.pop();
                continue;
            }
            let [a, b] = self.children[v as usize];
            if built[a as usize].is_some() && built[b as usize].is_some() {
                let ta = built[a as usize].take().unwrap();
                let tb = built[b as usize].take().unwrap();
                built[v as usize] = Some(PlaneTree::node(ta, tb));
                stack.pop();
            } else {
                if built[b as usize].is_none() {
                    stack.push(b);
                }
                if built[a as usize].is_none() {
                    stack.push(a);
                }
            }
        }
        built[self.root as usize].take().unwrap()
    }
}

/// One uniform plane binary tree with n leaves.
pub fn sample_plane_tree(n: u64, rng: &mut Rng) -> PlaneTree {
    RemyBuf::sample(n, rng).to_plane()
}

// ---------------------------------------------------------------------------
// Automorphism sampling
// ---------------------------------------------------------------------------

pub(crate) fn concat_perms(a: &Perm, b: &Perm) -> Perm {
    let na = a.len() as u32;
    let mut images: Vec<u32> = a.images().to_vec();
    images.extend(b.images().iter().map(|&x| x + na));
    Perm::from_images(images).expect("disjoint blocks stay bijective")
}

/// Uniform over the full automorphism group of `t`.
pub(crate) fn sample_uniform_automorphism(t: &CanonicalTree, rng: &mut Rng) -> Perm {
    match t.children() {
        None => Perm::identity(1),
        Some((a, b)) => {
            if a == b && rng.coin() {
                let psi1 = sample_uniform_automorphism(a, rng);
                let psi2 = sample_uniform_automorphism(a, rng);
                swap_element(&psi1, &psi2)
            } else {
                let alpha = sample_uniform_automorphism(a, rng);
                let beta = sample_uniform_automorphism(b, rng);
                concat_perms(&alpha, &beta)
            }
        }
    }
}

/// The branch-swapping element sending first-copy position i to psi1(i) in
/// the second copy and second-copy position j to psi2(j) in the first; its
/// square acts as psi2∘psi1 on the first copy.
pub(crate) fn swap_element(psi1: &Perm, psi2: &Perm) -> Perm {
    let half = psi1.len() as u32;
    let mut images = Vec::with_capacity(2 * half as usize);
    images.extend(psi1.images().iter().map(|&x| x + half));
    images.extend(psi2.images().iter().copied());
    Perm::from_images(images).expect("cross maps stay bijective")
}

/// Uniform over the automorphisms of `t` whose leaf cycle type is the
/// partition behind `target`. Panics if no automorphism has that type.
pub(crate) fn sample_automorphism_of_type(
    t: &CanonicalTree,
    target: Pid,
    rng: &mut Rng,
) -> Perm {
    match t.children() {
        None => {
            debug_assert_eq!(partition_of(target).n(), 1);
            Perm::identity(1)
        }
        Some((a, b)) => {
            let sa = spectrum_pids(a);
            let sb = spectrum_pids(b);
            // Options: split the type over the branches, or (identical
            // branches only) realize it as a swap doubling its half-type.
            let mut options: Vec<(Option<(Pid, Pid)>, u64)> = Vec::new();
            for &(pa, ca) in sa.iter() {
                for &(pb, cb) in sb.iter() {
                    if crate::partition::pid_union(pa, pb) == target {
                        options.push((Some((pa, pb)), ca * cb));
                    }
                }
            }
            if a == b {
                if let Some(half) = partition_of(target).half() {
                    let half_pid = pid_of(&half);
                    if let Ok(i) = sa.binary_search_by_key(&half_pid, |&(p, _)| p) {
                        let weight = (1u64 << a.generators()) * sa[i].1;
                        options.push((None, weight));
                    }
                }
            }
            let cum: Vec<u64> = options
                .iter()
                .scan(0u64, |acc, &(_, w)| {
                    *acc += w;
                    Some(*acc)
                })
                .collect();
            assert!(
                cum.last().is_some_and(|&w| w > 0),
                "no automorphism of the requested type"
            );
            match options[rng.choose_cum_u64(&cum)].0 {
                Some((pa, pb)) => {
                    let alpha = sample_automorphism_of_type(a, pa, rng);
                    let beta = sample_automorphism_of_type(b, pb, rng);
                    concat_perms(&alpha, &beta)
                }
                None => {
                    let half = partition_of(target).half().expect("swap option implies even parts");
                    let pi = sample_automorphism_of_type(a, pid_of(&half), rng);
                    let psi1 = sample_uniform_automorphism(a, rng);
                    let psi2 = pi.compose(&psi1.inverse());
                    swap_element(&psi1, &psi2)
                }
            }
        }
    }
}

/// Uniform permutation m with m·u·m⁻¹ = w, assuming u and w share a cycle
/// type; there are exactly z_λ of them (cycle assignment and rotations).
pub(crate) fn conjugating_permutation(u: &Perm, w: &Perm, rng: &mut Rng) -> Perm {
    use std::collections::BTreeMap;
    let mut by_len: BTreeMap<usize, (Vec<Vec<u32>>, Vec<Vec<u32>>)> = BTreeMap::new();
    for c in u.cycles() {
        by_len.entry(c.len()).or_default().0.push(c);
    }
    for c in w.cycles() {
        by_len.entry(c.len()).or_default().1.push(c);
    }
    let mut images = vec![0u32; u.len()];
    for (len, (ucs, wcs)) in &by_len {
        assert_eq!(ucs.len(), wcs.len(), "cycle types differ");
        let mut order: Vec<usize> = (0..wcs.len()).collect();
        rng.shuffle(&mut order);
        for (uc, &wi) in ucs.iter().zip(order.iter()) {
            let wc = &wcs[wi];
            let r = rng.index(*len as u64) as usize;
            for (i, &x) in uc.iter().enumerate() {
                images[x as usize] = wc[(i + r) % len];
            }
        }
    }
    Perm::from_images(images).expect("cycle transport is bijective")
}

// ---------------------------------------------------------------------------
// Exact tanglegram sampler
// ---------------------------------------------------------------------------

/// Draws uniform tanglegrams of size n. Deterministic in (seed, stream);
/// every selection uses single-draw 128-bit inverse-CDF lookups, so equal
/// seeds reproduce byte-identical streams on any platform.
pub struct ExactSampler {
    ens: Arc<Ensemble>,
    lambda_cdf: Vec<BigUint>,
    rng: Rng,
}

impl ExactSampler {
    pub fn new(n: u64, seed: u64, caps: &Caps) -> Result<ExactSampler> {
        ExactSampler::with_stream(n, seed, 0, caps)
    }

    /// Sampler on an independent stream; use distinct streams to
    /// parallelize one seed.
    pub fn with_stream(n: u64, seed: u64, stream: u64, caps: &Caps) -> Result<ExactSampler> {
        if n > caps.sampler_leaves as u64 {
            return Err(Error::resource("sampler leaves", n, caps.sampler_leaves));
        }
        let ens = ensemble(n, caps)?;
        let mut acc = BigUint::default();
        let lambda_cdf = lambda_rows(n)
            .into_iter()
            .map(|row| {
                acc += row.weight;
                acc.clone()
            })
            .collect();
        Ok(ExactSampler {
            ens,
            lambda_cdf,
            rng: Rng::with_stream(seed, stream),
        })
    }

    pub fn n(&self) -> u64 {
        self.ens.n
    }

    pub fn sample(&mut self) -> Tanglegram {
        let li = self.rng.choose_cum_big(&self.lambda_cdf);
        let pid = self.ens.pids[li];
        let tree_cdf = self.ens.tree_cdf(li);
        let left = self.ens.trees[self.rng.choose_cum_u64(&tree_cdf)].clone();
        let right = self.ens.trees[self.rng.choose_cum_u64(&tree_cdf)].clone();
        let u = sample_automorphism_of_type(&left, pid, &mut self.rng);
        let w = sample_automorphism_of_type(&right, pid, &mut self.rng);
        let matching = conjugating_permutation(&u, &w, &mut self.rng);
        Tanglegram {
            left,
            matching,
            right,
        }
    }
}

// ---------------------------------------------------------------------------
// Approximate sampler
// ---------------------------------------------------------------------------

/// Draws from the product measure instead: two independent uniform plane
/// trees and a uniform matching. The induced distribution on tanglegrams
/// is not uniform, but approaches it as n grows; use it far beyond the
/// exact sampler's range.
pub struct ApproxSampler {
    n: u64,
    rng: Rng,
}

/// Raw product-measure draw before canonicalization: `sigma[i]` is the
/// depth-first leaf position in `right` matched to position i in `left`.
pub(crate) struct PlanePair {
    pub left: RemyBuf,
    pub right: RemyBuf,
    pub sigma: Vec<u32>,
}

impl PlanePair {
    /// Matched cherries straight off the arrays.
    pub fn matched_cherries(&self) -> u32 {
        let n = self.left.n_leaves() as usize;
        let mut cherry_of = vec![NONE; n];
        for (id, (a, b)) in self.right.cherry_df_pairs().into_iter().enumerate() {
            cherry_of[a as usize] = id as u32;
            cherry_of[b as usize] = id as u32;
        }
        let mut count = 0;
        for (a, b) in self.left.cherry_df_pairs() {
            let ca = cherry_of[self.sigma[a as usize] as usize];
            if ca != NONE && ca == cherry_of[self.sigma[b as usize] as usize] {
                count += 1;
            }
        }
        count
    }
}

impl ApproxSampler {
    pub fn new(n: u64, seed: u64) -> Result<ApproxSampler> {
        ApproxSampler::with_stream(n, seed, 0)
    }

    pub fn with_stream(n: u64, seed: u64, stream: u64) -> Result<ApproxSampler> {
        if n == 0 {
            return Err(Error::Domain("trees have at least one leaf".into()));
        }
        if n > (u32::MAX / 2) as u64 {
            return Err(Error::Domain("size exceeds u32 node ids".into()));
        }
        Ok(ApproxSampler {
            n,
            rng: Rng::with_stream(seed, stream),
        })
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    pub(crate) fn sample_pair(&mut self) -> PlanePair {
        let left = RemyBuf::sample(self.n, &mut self.rng);
        let right = RemyBuf::sample(self.n, &mut self.rng);
        let mut sigma: Vec<u32> = (0..self.n as u32).collect();
        self.rng.shuffle(&mut sigma);
        PlanePair { left, right, sigma }
    }

    pub fn sample(&mut self) -> Tanglegram {
        let pair = self.sample_pair();
        let (left, rho_l) = canonicalize_with_leaf_perm(&pair.left.to_plane());
        let (right, rho_r) = canonicalize_with_leaf_perm(&pair.right.to_plane());
        let sigma = Perm::from_images(pair.sigma).expect("shuffle of identity is bijective");
        let matching = rho_r.compose(&sigma).compose(&rho_l.inverse());
        Tanglegram {
            left,
            matching,
            right,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::partition::BinaryPartition;
    use crate::spectrum::cycle_spectrum;
    use crate::tree::{canonicalize, catalan};
    use std::collections::BTreeMap;

    #[test]
    fn growth_produces_uniform_plane_trees() {
        let mut rng = Rng::new(2024);
        let mut counts: BTreeMap<String, u32> = BTreeMap::new();
        let rounds = 5000;
        for _ in 0..rounds {
            let t = sample_plane_tree(4, &mut rng);
            *counts.entry(t.to_string()).or_insert(0) += 1;
        }
        let c4: u64 = catalan(4).try_into().unwrap();
        assert_eq!(counts.len(), c4 as usize);
        let expected = rounds as f64 / c4 as f64;
        for (tree, &hits) in &counts {
            assert!(
                (hits as f64 - expected).abs() < 5.0 * expected.sqrt(),
                "tree {tree}: {hits} of {rounds}"
            );
        }
    }

    #[test]
    fn array_statistics_match_boxed_tree() {
        let mut rng = Rng::new(9);
        for n in [1u64, 2, 3, 7, 40, 200] {
            for _ in 0..20 {
                let buf = RemyBuf::sample(n, &mut rng);
                let plane = buf.to_plane();
                assert_eq!(buf.n_leaves(), plane.leaves());
                assert_eq!(buf.height(), plane.height());
                assert_eq!(buf.cherries(), plane.cherries());
                let canon = canonicalize(&plane);
                assert_eq!(
                    buf.cherry_df_pairs().len(),
                    canon.cherries() as usize
                );
            }
        }
    }

    #[test]
    fn uniform_automorphisms_cover_the_group() {
        let t: CanonicalTree = "((L,L),(L,L))".parse().unwrap();
        let mut rng = Rng::new(31);
        let mut census: BTreeMap<String, u32> = BTreeMap::new();
        let rounds = 4000;
        for _ in 0..rounds {
            let p = sample_uniform_automorphism(&t, &mut rng);
            *census.entry(p.to_string()).or_insert(0) += 1;
        }
        assert_eq!(census.len(), 8, "|A| = 8 distinct elements");
        for (p, &hits) in &census {
            let expected = rounds as f64 / 8.0;
            assert!(
                (hits as f64 - expected).abs() < 5.0 * expected.sqrt(),
                "automorphism {p}: {hits}"
            );
        }
        // Type census must match the spectrum exactly in proportion.
        let spec = cycle_spectrum(&t, &Caps::default()).unwrap();
        let mut by_type: BTreeMap<String, u32> = BTreeMap::new();
        let mut rng = Rng::new(77);
        for _ in 0..4000 {
            let p = sample_uniform_automorphism(&t, &mut rng);
            let ty = BinaryPartition::from_parts(&p.cycle_type()).unwrap().to_string();
            *by_type.entry(ty).or_insert(0) += 1;
        }
        for (lam, count) in spec.entries() {
            let hits = by_type[&lam.to_string()];
            let expected = 4000.0 * (*count as f64) / 8.0;
            assert!(
                (hits as f64 - expected).abs() < 5.0 * expected.sqrt().max(3.0),
                "type {lam}: {hits} vs {expected}"
            );
        }
    }

    #[test]
    fn typed_automorphisms_have_the_requested_type() {
        let trees = [
            "((L,L),(L,L))",
            "(L,(L,(L,L)))",
            "((L,(L,L)),(L,(L,L)))",
            "(((L,L),(L,L)),((L,L),(L,L)))",
        ];
        let mut rng = Rng::new(5150);
        for s in trees {
            let t: CanonicalTree = s.parse().unwrap();
            let spec = cycle_spectrum(&t, &Caps::default()).unwrap();
            for (lam, _) in spec.entries() {
                let pid = pid_of(lam);
                for _ in 0..25 {
                    let p = sample_automorphism_of_type(&t, pid, &mut rng);
                    let got = BinaryPartition::from_parts(&p.cycle_type()).unwrap();
                    assert_eq!(&got, lam, "tree {t}");
                }
            }
        }
    }

    #[test]
    fn typed_sampling_is_uniform_within_the_type() {
        // Complete 4-leaf tree, type 2+2: exactly three automorphisms.
        let t: CanonicalTree = "((L,L),(L,L))".parse().unwrap();
        let lam = BinaryPartition::from_parts(&[2, 2]).unwrap();
        let pid = pid_of(&lam);
        let mut rng = Rng::new(404);
        let mut census: BTreeMap<String, u32> = BTreeMap::new();
        let rounds = 3000;
        for _ in 0..rounds {
            let p = sample_automorphism_of_type(&t, pid, &mut rng);
            *census.entry(p.to_string()).or_insert(0) += 1;
        }
        assert_eq!(census.len(), 3);
        for (_, &hits) in &census {
            let expected = rounds as f64 / 3.0;
            assert!((hits as f64 - expected).abs() < 5.0 * expected.sqrt());
        }
    }

    #[test]
    fn conjugation_transports_cycles() {
        let mut rng = Rng::new(8);
        let u: Perm = "2,1,3,5,4".parse().unwrap();
        let w: Perm = "1,3,2,5,4".parse().unwrap();
        for _ in 0..200 {
            let m = conjugating_permutation(&u, &w, &mut rng);
            let lhs = m.compose(&u).compose(&m.inverse());
            assert_eq!(lhs, w);
        }
    }

    #[test]
    fn conjugation_hits_all_solutions_uniformly() {
        // u = w = a transposition on 3 points: z = 2 solutions.
        let u: Perm = "2,1,3".parse().unwrap();
        let mut rng = Rng::new(12);
        let mut census: BTreeMap<String, u32> = BTreeMap::new();
        for _ in 0..2000 {
            let m = conjugating_permutation(&u, &u, &mut rng);
            *census.entry(m.to_string()).or_insert(0) += 1;
        }
        assert_eq!(census.len(), 2);
        for (_, &hits) in &census {
            assert!((hits as f64 - 1000.0).abs() < 5.0 * 1000f64.sqrt());
        }
        // Identity type: all n! permutations are solutions.
        let id = Perm::identity(3);
        let mut census: BTreeMap<String, u32> = BTreeMap::new();
        for _ in 0..3000 {
            let m = conjugating_permutation(&id, &id, &mut rng);
            *census.entry(m.to_string()).or_insert(0) += 1;
        }
        assert_eq!(census.len(), 6);
    }

    #[test]
    fn exact_sampler_is_deterministic_per_seed_and_stream() {
        let caps = Caps::default();
        let mut a = ExactSampler::with_stream(6, 99, 2, &caps).unwrap();
        let mut b = ExactSampler::with_stream(6, 99, 2, &caps).unwrap();
        for _ in 0..50 {
            assert_eq!(a.sample().to_string(), b.sample().to_string());
        }
        let mut c = ExactSampler::with_stream(6, 99, 3, &caps).unwrap();
        let fresh: Vec<String> = (0..20).map(|_| c.sample().to_string()).collect();
        let mut d = ExactSampler::with_stream(6, 99, 2, &caps).unwrap();
        let again: Vec<String> = (0..20).map(|_| d.sample().to_string()).collect();
        assert_ne!(fresh, again, "streams should diverge");
    }

    #[test]
    fn exact_sampler_outputs_are_wellformed() {
        let caps = Caps::default();
        let mut s = ExactSampler::new(7, 1234, &caps).unwrap();
        for _ in 0..200 {
            let tg = s.sample();
            assert_eq!(tg.n(), 7);
            assert_eq!(tg.matching().len(), 7);
            assert_eq!(tg.left().leaves(), 7);
            assert_eq!(tg.right().leaves(), 7);
        }
    }

    #[test]
    fn exact_sampler_respects_cap() {
        let caps = Caps {
            sampler_leaves: 10,
            ..Caps::default()
        };
        assert!(matches!(
            ExactSampler::new(11, 0, &caps),
            Err(Error::ResourceLimit { .. })
        ));
    }

    #[test]
    fn approximate_sampler_outputs_are_wellformed() {
        let mut s = ApproxSampler::new(30, 5).unwrap();
        for _ in 0..50 {
            let tg = s.sample();
            assert_eq!(tg.n(), 30);
            let back: Tanglegram = tg.to_string().parse().unwrap();
            assert_eq!(back, tg);
        }
    }

    #[test]
    fn tanglegram_parse_round_trip_and_validation() {
        let tg: Tanglegram = "((L,L),(L,L)) ; 2,1,4,3 ; (L,(L,(L,L)))".parse().unwrap();
        assert_eq!(tg.n(), 4);
        assert_eq!(tg.to_string(), "((L,L),(L,L)) ; 2,1,4,3 ; (L,(L,(L,L)))");

        assert!("(L,L) ; 1,2 ; (L,(L,L))".parse::<Tanglegram>().is_err());
        assert!("(L,L) ; 1,2,3 ; (L,L)".parse::<Tanglegram>().is_err());
        assert!("(L,L) ; 1,2".parse::<Tanglegram>().is_err());
    }

    #[test]
    fn plane_pair_matched_cherries_agree_with_matching_definition() {
        // Cross-check the array fast path against the canonicalized
        // tanglegram on many random draws.
        let mut s = ApproxSampler::new(9, 314).unwrap();
        for _ in 0..300 {
            let pair = s.sample_pair();
            let fast = pair.matched_cherries();

            let (left, rho_l) = canonicalize_with_leaf_perm(&pair.left.to_plane());
            let (right, rho_r) = canonicalize_with_leaf_perm(&pair.right.to_plane());
            let sigma = Perm::from_images(pair.sigma.clone()).unwrap();
            let matching = rho_r.compose(&sigma).compose(&rho_l.inverse());

            let mut slow = 0;
            let right_pairs = right.cherry_leaf_pairs();
            for (a, b) in left.cherry_leaf_pairs() {
                let (ma, mb) = (
                    matching.apply(a as usize) as u32,
                    matching.apply(b as usize) as u32,
                );
                let (lo, hi) = (ma.min(mb), ma.max(mb));
                if right_pairs.contains(&(lo, hi)) {
                    slow += 1;
                }
            }
            assert_eq!(fast, slow);
        }
    }
}
