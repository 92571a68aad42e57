//! Brute-force ground truth at small sizes: explicit automorphism groups,
//! canonical matchings by full orbit scan, complete tanglegram enumeration,
//! and exact small-n distributions. No pruning; correctness over speed.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::sync::{Arc, Mutex};

use num::bigint::BigUint;
use num::rational::BigRational;
use num::{One, Zero};
use once_cell::sync::Lazy;
use rayon::prelude::*;
use serde::Serialize;

use crate::caps::Caps;
use crate::error::{Error, Result};
use crate::perm::{Perm, Permutations};
use crate::sampling::{concat_perms, swap_element, Tanglegram};
use crate::stats::matched_cherries;
use crate::tree::{
    canonicalize_with_leaf_perm, enumerate_canonical_trees, enumerate_plane_trees, CanonicalTree,
};
use crate::util::ratio;

/// Every automorphism of `t` as a permutation of its depth-first leaf
/// positions. The group has 2^g elements for g symmetric internal nodes, so
/// the orbit cap bounds the result size.
pub fn enumerate_automorphisms(t: &CanonicalTree, caps: &Caps) -> Result<Vec<Perm>> {
    let g = t.generators();
    if g as u64 >= 64 || (1u64 << g) > caps.orbit {
        return Err(Error::resource(
            "automorphism group",
            format!("2^{g}"),
            caps.orbit.to_string(),
        ));
    }
    fn rec(t: &CanonicalTree) -> Vec<Perm> {
        let Some((a, b)) = t.children() else {
            return vec![Perm::identity(1)];
        };
        let left = rec(a);
        let right = rec(b);
        let mut out = Vec::with_capacity(left.len() * right.len() * 2);
        for pa in &left {
            for pb in &right {
                out.push(concat_perms(pa, pb));
            }
        }
        if a == b {
            for pa in &left {
                for pb in &right {
                    out.push(swap_element(pa, pb));
                }
            }
        }
        out
    }
    Ok(rec(t))
}

/// Structural membership test for the automorphism group of `t`, independent
/// of `enumerate_automorphisms`: every internal node must map its two leaf
/// blocks onto themselves, or exchange them when its branches are identical.
pub fn is_automorphism(t: &CanonicalTree, p: &Perm) -> bool {
    if p.len() as u64 != t.leaves() {
        return false;
    }
    fn rec(t: &CanonicalTree, img: &[u32], base: u32) -> bool {
        let Some((a, b)) = t.children() else {
            return true;
        };
        let na = a.leaves() as usize;
        let n = img.len();
        let (first, second) = img.split_at(na);
        let lo = base;
        let mid = base + na as u32;
        let hi = base + n as u32;
        let keeps = first.iter().all(|&v| v >= lo && v < mid)
            && second.iter().all(|&v| v >= mid && v < hi);
        if keeps {
            return rec(a, first, lo) && rec(b, second, mid);
        }
        let swaps = a == b
            && first.iter().all(|&v| v >= mid && v < hi)
            && second.iter().all(|&v| v >= lo && v < mid);
        swaps && rec(a, first, mid) && rec(b, second, lo)
    }
    rec(t, p.images(), 0)
}

fn orbit_groups(tg: &Tanglegram, caps: &Caps) -> Result<(Vec<Perm>, Vec<Perm>)> {
    let gl = tg.left().generators() as u64;
    let gr = tg.right().generators() as u64;
    if gl + gr >= 64 || (1u64 << (gl + gr)) > caps.orbit {
        return Err(Error::resource(
            "matching orbit",
            format!("2^{}", gl + gr),
            caps.orbit.to_string(),
        ));
    }
    Ok((
        enumerate_automorphisms(tg.left(), caps)?,
        enumerate_automorphisms(tg.right(), caps)?,
    ))
}

/// Canonical representative of a tanglegram: the lexicographically minimal
/// matching u∘m∘w over the automorphisms u of the left tree and w of the
/// right tree, found by full orbit scan.
pub fn canonicalize_tanglegram(tg: &Tanglegram, caps: &Caps) -> Result<Tanglegram> {
    let (auts_l, auts_r) = orbit_groups(tg, caps)?;
    let mut best: Option<Perm> = None;
    for u in &auts_l {
        let um = u.compose(tg.matching());
        for w in &auts_r {
            let cand = um.compose(w);
            if best.as_ref().map_or(true, |b| cand.images() < b.images()) {
                best = Some(cand);
            }
        }
    }
    Tanglegram::new(tg.left().clone(), best.unwrap(), tg.right().clone())
}

/// Number of pairs (u, w) of automorphisms with u∘m∘w = m, i.e. the size of
/// the stabilizer of the matching in the product group.
pub fn pair_stabilizer_size(tg: &Tanglegram, caps: &Caps) -> Result<u64> {
    let g = tg.left().generators();
    if g as u64 >= 64 || (1u64 << g) > caps.orbit {
        return Err(Error::resource(
            "automorphism group",
            format!("2^{g}"),
            caps.orbit.to_string(),
        ));
    }
    let auts_l = enumerate_automorphisms(tg.left(), caps)?;
    let m = tg.matching();
    let m_inv = m.inverse();
    // u∘m∘w = m forces w = m⁻¹∘u⁻¹∘m, so count u whose conjugate lands in
    // the right group; u⁻¹ ranges over the same group as u.
    let count = auts_l
        .iter()
        .filter(|u| is_automorphism(tg.right(), &m_inv.compose(&u.compose(m))))
        .count();
    Ok(count as u64)
}

/// Complete duplicate-free list of tanglegrams on `n` leaves: all ordered
/// pairs of canonical trees, each with every matching reduced to its
/// canonical representative. Exponential; gated by the oracle cap.
pub fn enumerate_tanglegrams(n: u64, caps: &Caps) -> Result<Arc<Vec<Tanglegram>>> {
    static CACHE: Lazy<Mutex<HashMap<u64, Arc<Vec<Tanglegram>>>>> =
        Lazy::new(|| Mutex::new(HashMap::new()));
    if n == 0 || n > caps.oracle_leaves as u64 {
        return Err(Error::resource(
            "oracle enumeration",
            n.to_string(),
            caps.oracle_leaves.to_string(),
        ));
    }
    let mut cache = CACHE.lock().unwrap();
    if let Some(list) = cache.get(&n) {
        return Ok(list.clone());
    }
    let trees = enumerate_canonical_trees(n, caps)?;
    let pairs: Vec<(usize, usize)> = (0..trees.len())
        .flat_map(|i| (0..trees.len()).map(move |j| (i, j)))
        .collect();
    let per_pair = pairs
        .par_iter()
        .map(|&(i, j)| -> Result<Vec<Tanglegram>> {
            let left = &trees[i];
            let right = &trees[j];
            let mut reps = BTreeSet::new();
            for sigma in Permutations::new(n as usize) {
                let tg = Tanglegram::new(left.clone(), sigma, right.clone())?;
                reps.insert(canonicalize_tanglegram(&tg, caps)?.matching().clone());
            }
            reps.into_iter()
                .map(|m| Tanglegram::new(left.clone(), m, right.clone()))
                .collect()
        })
        .collect::<Result<Vec<_>>>()?;
    let list: Vec<Tanglegram> = per_pair.into_iter().flatten().collect();
    let list = Arc::new(list);
    cache.insert(n, list.clone());
    Ok(list)
}

/// Exact matched-cherry distribution over the uniform measure on the
/// enumerated tanglegram list.
pub fn exact_matched_cherry_distribution(
    n: u64,
    caps: &Caps,
) -> Result<BTreeMap<u32, BigRational>> {
    let list = enumerate_tanglegrams(n, caps)?;
    let total = BigUint::from(list.len() as u64);
    let mut hist: BTreeMap<u32, u64> = BTreeMap::new();
    for tg in list.iter() {
        *hist.entry(matched_cherries(tg)).or_insert(0) += 1;
    }
    Ok(hist
        .into_iter()
        .map(|(k, c)| (k, ratio(BigUint::from(c), total.clone())))
        .collect())
}

/// One audited tanglegram: its stabilizer size against the matched-cherry
/// prediction 2^k.
#[derive(Debug, Clone, Serialize)]
pub struct AuditRow {
    pub tanglegram: String,
    pub stabilizer: u64,
    pub matched_cherries: u32,
}

/// Stabilizer audit over every tanglegram of size `n`: how often the
/// stabilizer is exactly the group generated by matched-cherry swaps.
#[derive(Debug, Clone, Serialize)]
pub struct AutomorphismAudit {
    pub n: u64,
    pub total: u64,
    pub coincide: u64,
    pub rows: Vec<AuditRow>,
}

pub fn automorphism_audit(n: u64, caps: &Caps) -> Result<AutomorphismAudit> {
    let list = enumerate_tanglegrams(n, caps)?;
    let mut rows = Vec::with_capacity(list.len());
    let mut coincide = 0u64;
    for tg in list.iter() {
        let stab = pair_stabilizer_size(tg, caps)?;
        let k = matched_cherries(tg);
        if stab == 1u64 << k {
            coincide += 1;
        }
        rows.push(AuditRow {
            tanglegram: tg.to_string(),
            stabilizer: stab,
            matched_cherries: k,
        });
    }
    Ok(AutomorphismAudit {
        n,
        total: list.len() as u64,
        coincide,
        rows,
    })
}

fn triple_sweep(n: u64, caps: &Caps) -> Result<(BigUint, BTreeMap<String, u64>)> {
    if n == 0 || n > caps.oracle_leaves as u64 {
        return Err(Error::resource(
            "plane triple sweep",
            n.to_string(),
            caps.oracle_leaves.to_string(),
        ));
    }
    let mut stab_total = BigUint::zero();
    let mut counts: BTreeMap<String, u64> = BTreeMap::new();
    let planes: Vec<(CanonicalTree, Perm)> = enumerate_plane_trees(n, caps)?
        .map(|p| canonicalize_with_leaf_perm(&p))
        .collect();
    for (t1, r1) in &planes {
        let r1_inv = r1.inverse();
        for (t2, r2) in &planes {
            for sigma in Permutations::new(n as usize) {
                // Same transport as the plane-pair sampler: the matching a
                // plane drawing induces on the canonical leaf orders.
                let m = r2.compose(&sigma.compose(&r1_inv));
                let tg = Tanglegram::new(t1.clone(), m, t2.clone())?;
                stab_total += pair_stabilizer_size(&tg, caps)?;
                let key = canonicalize_tanglegram(&tg, caps)?.to_string();
                *counts.entry(key).or_insert(0) += 1;
            }
        }
    }
    Ok((stab_total, counts))
}

/// Σ over all (plane tree, plane tree, matching) triples of their stabilizer
/// size, divided by 4^(n-1). Orbit-stabilizer counting makes each distinct
/// tanglegram contribute exactly 1, so the total equals t_n.
pub fn triple_weight_total(n: u64, caps: &Caps) -> Result<BigRational> {
    let (stab_total, _) = triple_sweep(n, caps)?;
    Ok(ratio(stab_total, BigUint::one() << (2 * (n - 1))))
}

/// For every tanglegram of size `n`, the number of (plane tree, plane tree,
/// matching) triples representing it, keyed by canonical string.
pub fn plane_representation_counts(n: u64, caps: &Caps) -> Result<BTreeMap<String, u64>> {
    Ok(triple_sweep(n, caps)?.1)
}
