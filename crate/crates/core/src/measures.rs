//! Tanglegram counting and the shape measure a uniform tanglegram induces
//! on its tree pair, compared against independent uniform plane trees.
//!
//! Everything here is exact. The two counting routes share nothing except
//! the partition machinery: the closed form sums q(λ)²/z_λ over binary
//! partitions, while the tree-sum route accumulates automorphism counts
//! over the actual trees, so agreement between them exercises both the
//! spectrum recursion and the partition statistics.

use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use num::{BigRational, BigUint, One, Zero};
use once_cell::sync::Lazy;

use crate::caps::Caps;
use crate::error::{Error, Result};
use crate::partition::{binary_partitions, pid_of, BinaryPartition, Pid};
use crate::spectrum::{aut_size, cycle_spectrum, spectrum_pids};
use crate::tree::{catalan, enumerate_canonical_trees, CanonicalTree};
use crate::util::{big_ratio_f64, factorial, ratio};

/// Per-partition row of the count decomposition: `weight` is the number of
/// (permutation of type λ, ordered tree pair fixing it) incidences,
/// i.e. (n!/z_λ)·q(λ)².
#[derive(Debug, Clone)]
pub struct LambdaRow {
    pub partition: BinaryPartition,
    pub z: BigUint,
    pub q: BigUint,
    pub weight: BigUint,
}

/// Count decomposition by cycle type; rows in largest-part-first order.
pub fn lambda_rows(n: u64) -> Vec<LambdaRow> {
    let nf = factorial(n);
    binary_partitions(n)
        .into_iter()
        .map(|lam| {
            let z = lam.z();
            let q = lam.q();
            debug_assert!((&nf % &z).is_zero());
            let weight = &nf / &z * &q * &q;
            LambdaRow {
                partition: lam,
                z,
                q,
                weight,
            }
        })
        .collect()
}

/// Number of tanglegrams with n leaves: pairs of rooted binary trees with a
/// leaf matching, up to isomorphism on both sides. Computed from the
/// partition decomposition; exact for any n.
pub fn tanglegram_count(n: u64) -> BigUint {
    static MEMO: Lazy<Mutex<HashMap<u64, BigUint>>> = Lazy::new(|| Mutex::new(HashMap::new()));
    if let Some(t) = MEMO.lock().unwrap().get(&n) {
        return t.clone();
    }
    let total: BigUint = lambda_rows(n).iter().map(|row| &row.weight).sum();
    let nf = factorial(n);
    assert!((&total % &nf).is_zero(), "incidence total divisible by n!");
    let t = total / nf;
    MEMO.lock().unwrap().insert(n, t.clone());
    t
}

// ---------------------------------------------------------------------------
// Tree ensembles: per-λ weights of every canonical tree
// ---------------------------------------------------------------------------

/// All canonical trees of one size with, per binary partition λ, the weight
/// w_λ(T) = |A(T)_λ|·2^(n-1-g(T)) and the column sums S_λ. The identity
/// S_λ·z_λ = q(λ)·2^(n-1) ties these to the partition statistics.
pub(crate) struct Ensemble {
    pub n: u64,
    pub trees: Arc<Vec<CanonicalTree>>,
    pub lambdas: Vec<BinaryPartition>,
    pub pids: Vec<Pid>,
    pub s_values: Vec<u64>,
    tree_cdfs: Mutex<HashMap<usize, Arc<Vec<u64>>>>,
}

impl Ensemble {
    pub fn lambda_index(&self, pid: Pid) -> Option<usize> {
        self.pids.iter().position(|&p| p == pid)
    }

    pub fn weight_of(&self, tree: &CanonicalTree, lambda_idx: usize) -> u64 {
        let spec = spectrum_pids(tree);
        let pid = self.pids[lambda_idx];
        match spec.binary_search_by_key(&pid, |&(p, _)| p) {
            Ok(i) => spec[i].1 << (self.n - 1 - tree.generators() as u64),
            Err(_) => 0,
        }
    }

    /// Cumulative w_λ over the trees in enumeration order; total is S_λ.
    pub fn tree_cdf(&self, lambda_idx: usize) -> Arc<Vec<u64>> {
        if let Some(c) = self.tree_cdfs.lock().unwrap().get(&lambda_idx) {
            return c.clone();
        }
        let mut cum = Vec::with_capacity(self.trees.len());
        let mut acc = 0u64;
        for t in self.trees.iter() {
            acc += self.weight_of(t, lambda_idx);
            cum.push(acc);
        }
        debug_assert_eq!(acc, self.s_values[lambda_idx]);
        let arc = Arc::new(cum);
        self.tree_cdfs
            .lock()
            .unwrap()
            .entry(lambda_idx)
            .or_insert(arc)
            .clone()
    }
}

pub(crate) fn ensemble(n: u64, caps: &Caps) -> Result<Arc<Ensemble>> {
    static CACHE: Lazy<Mutex<HashMap<u64, Arc<Ensemble>>>> =
        Lazy::new(|| Mutex::new(HashMap::new()));
    // The build is held under the cache lock so concurrent callers (the
    // parallel law verifiers spawn one sampler per chunk) wait for one
    // construction instead of duplicating it. Nothing below re-enters here.
    let mut cache = CACHE.lock().unwrap();
    if let Some(e) = cache.get(&n) {
        return Ok(e.clone());
    }
    let trees = enumerate_canonical_trees(n, caps)?;
    // Column sums stay in u64 iff the all-types total 2^(n-1)·#trees does.
    let grand = (BigUint::one() << (n - 1)) * BigUint::from(trees.len() as u64);
    if grand > BigUint::from(u64::MAX) {
        return Err(Error::Domain(format!(
            "tree weight table overflows u64 at {n} leaves"
        )));
    }
    let lambdas = binary_partitions(n);
    let pids: Vec<Pid> = lambdas.iter().map(pid_of).collect();
    let index: HashMap<Pid, usize> = pids.iter().copied().enumerate().map(|(i, p)| (p, i)).collect();
    let mut s_values = vec![0u64; lambdas.len()];
    for t in trees.iter() {
        let shift = (n - 1) - t.generators() as u64;
        for &(p, c) in spectrum_pids(t).iter() {
            s_values[index[&p]] += c << shift;
        }
    }
    let ens = Arc::new(Ensemble {
        n,
        trees,
        lambdas,
        pids,
        s_values,
        tree_cdfs: Mutex::new(HashMap::new()),
    });
    cache.insert(n, ens.clone());
    Ok(ens)
}

/// Tanglegram count recomputed from the enumerated trees:
/// t_n = Σ_λ z_λ·S_λ² / 4^(n-1). Independent of `tanglegram_count` except
/// for the partition statistics.
pub fn tanglegram_count_tree_sum(n: u64, caps: &Caps) -> Result<BigUint> {
    let ens = ensemble(n, caps)?;
    let mut acc = BigUint::zero();
    for (i, lam) in ens.lambdas.iter().enumerate() {
        let s = BigUint::from(ens.s_values[i]);
        acc += lam.z() * &s * &s;
    }
    let denom = BigUint::one() << (2 * (n - 1));
    if !(&acc % &denom).is_zero() {
        return Err(Error::Internal(
            "tree-sum total not divisible by 4^(n-1)".into(),
        ));
    }
    Ok(acc / denom)
}

// ---------------------------------------------------------------------------
// Shape measures
// ---------------------------------------------------------------------------

/// Probability that a uniform tanglegram has left tree isomorphic to `left`
/// and right tree isomorphic to `right`:
/// Σ_λ z_λ·|A(left)_λ|·|A(right)_λ| / (|A(left)|·|A(right)|·t_n).
pub fn nu_t(left: &CanonicalTree, right: &CanonicalTree, caps: &Caps) -> Result<BigRational> {
    if left.leaves() != right.leaves() {
        return Err(Error::SizeMismatch {
            left: left.leaves() as usize,
            right: right.leaves() as usize,
        });
    }
    let sl = cycle_spectrum(left, caps)?;
    let sr = cycle_spectrum(right, caps)?;
    let mut num = BigUint::zero();
    for (lam, a1) in sl.entries() {
        let a2 = sr.count_for(lam);
        if a2 > 0 {
            num += lam.z() * BigUint::from(*a1) * BigUint::from(a2);
        }
    }
    let den = aut_size(left) * aut_size(right) * tanglegram_count(left.leaves());
    Ok(ratio(num, den))
}

/// Probability that two independent uniform plane trees have these
/// isomorphism classes: 2^(n-1-g(left))·2^(n-1-g(right)) / C_n².
pub fn nu_p(left: &CanonicalTree, right: &CanonicalTree) -> Result<BigRational> {
    if left.leaves() != right.leaves() {
        return Err(Error::SizeMismatch {
            left: left.leaves() as usize,
            right: right.leaves() as usize,
        });
    }
    let c = catalan(left.leaves());
    Ok(ratio(
        left.plane_embeddings() * right.plane_embeddings(),
        &c * &c,
    ))
}

/// Exact total variation distance between the two pair-shape measures at
/// size n, over all ordered pairs of isomorphism classes.
pub fn total_variation(n: u64, caps: &Caps) -> Result<BigRational> {
    if n > caps.pair_table_leaves as u64 {
        return Err(Error::resource("pair table leaves", n, caps.pair_table_leaves));
    }
    let ens = ensemble(n, caps)?;
    let trees = &ens.trees;
    let nl = ens.lambdas.len();

    // Everything over the common denominator D = t_n·4^(n-1)·C_n², which
    // fits u128 comfortably for n ≤ 14.
    let t_small: u128 = tanglegram_count(n)
        .try_into()
        .map_err(|_| Error::Internal("count exceeds u128".into()))?;
    let c_small: u128 = catalan(n)
        .try_into()
        .map_err(|_| Error::Internal("Catalan number exceeds u128".into()))?;
    let t4: u128 = t_small << (2 * (n - 1));
    let c2: u128 = c_small * c_small;
    let d: u128 = t4
        .checked_mul(c2)
        .ok_or_else(|| Error::Internal("common denominator exceeds u128".into()))?;

    let z: Vec<u128> = ens
        .lambdas
        .iter()
        .map(|lam| u128::try_from(lam.z()).map_err(|_| Error::Internal("z exceeds u128".into())))
        .collect::<Result<_>>()?;
    let dense: Vec<Vec<u64>> = trees
        .iter()
        .map(|t| (0..nl).map(|i| ens.weight_of(t, i)).collect())
        .collect();

    let mut sum_abs: u128 = 0;
    let mut norm_t: u128 = 0;
    let mut norm_p: u128 = 0;
    for i in 0..trees.len() {
        let gi = trees[i].generators() as u64;
        for j in i..trees.len() {
            let gj = trees[j].generators() as u64;
            let mut dot: u128 = 0;
            for (k, zk) in z.iter().enumerate() {
                dot += zk * dense[i][k] as u128 * dense[j][k] as u128;
            }
            let nu_t_num = dot * c2;
            let nu_p_num = t4 << (2 * (n - 1) - gi - gj);
            let mult: u128 = if i == j { 1 } else { 2 };
            sum_abs += mult * nu_t_num.abs_diff(nu_p_num);
            norm_t += mult * nu_t_num;
            norm_p += mult * nu_p_num;
        }
    }
    if norm_t != d || norm_p != d {
        return Err(Error::Internal("pair-shape measures failed to normalize".into()));
    }
    Ok(ratio(BigUint::from(sum_abs), BigUint::from(2u8) * BigUint::from(d)))
}

/// t_n·4^(n-1)/(n!·C_n²); converges to e^(1/8) from above.
pub fn asymptotic_ratio(n: u64) -> f64 {
    let num = tanglegram_count(n) << (2 * (n - 1));
    let c = catalan(n);
    let den = factorial(n) * &c * &c;
    big_ratio_f64(&num, &den)
}

pub fn asymptotic_limit() -> f64 {
    0.125f64.exp()
}

/// Probability that a uniform tanglegram's matching permutation, in cycle
/// type terms, has any cycle of length ≥ 4.
pub fn non_restricted_mass(n: u64) -> BigRational {
    let rows = lambda_rows(n);
    let num: BigUint = rows
        .iter()
        .filter(|row| row.partition.mults()[0].0 >= 2)
        .map(|row| &row.weight)
        .sum();
    let den = factorial(n) * tanglegram_count(n);
    ratio(num, den)
}

/// Exact expected number of cherries in the left tree of a uniform
/// tanglegram: Σ_λ z_λ·CW_λ·S_λ / (t_n·4^(n-1)) where CW weights each tree
/// by its cherry count.
pub fn tanglegram_cherry_mean(n: u64, caps: &Caps) -> Result<BigRational> {
    let ens = ensemble(n, caps)?;
    let mut cherry_w = vec![0u128; ens.lambdas.len()];
    for t in ens.trees.iter() {
        let c = t.cherries() as u128;
        if c == 0 {
            continue;
        }
        let shift = (n - 1) - t.generators() as u64;
        let spec = spectrum_pids(t);
        for &(p, cnt) in spec.iter() {
            let idx = ens.lambda_index(p).expect("spectrum type is a partition of n");
            cherry_w[idx] += c * ((cnt << shift) as u128);
        }
    }
    let mut num = BigUint::zero();
    for (i, lam) in ens.lambdas.iter().enumerate() {
        num += lam.z() * BigUint::from(cherry_w[i]) * BigUint::from(ens.s_values[i]);
    }
    let den = tanglegram_count(n) << (2 * (n - 1));
    Ok(ratio(num, den))
}

#[cfg(test)]
mod tests {
    use super::*;
    use num::BigInt;

    fn rat(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn count_sequence() {
        let want: [u64; 12] = [
            1,
            1,
            2,
            13,
            114,
            1509,
            25595,
            535753,
            13305590,
            382728552,
            12515198465,
            458621603279,
        ];
        for (i, &w) in want.iter().enumerate() {
            assert_eq!(tanglegram_count((i + 1) as u64), BigUint::from(w), "n = {}", i + 1);
        }
    }

    #[test]
    fn tree_sum_route_agrees_with_closed_form() {
        let caps = Caps::default();
        for n in 1..=9 {
            assert_eq!(
                tanglegram_count_tree_sum(n, &caps).unwrap(),
                tanglegram_count(n),
                "n = {n}"
            );
        }
    }

    #[test]
    fn column_sums_match_partition_statistics() {
        // S_λ·z_λ = q(λ)·2^(n-1) for every λ.
        let caps = Caps::default();
        for n in 1..=9 {
            let ens = ensemble(n, &caps).unwrap();
            for (i, lam) in ens.lambdas.iter().enumerate() {
                assert_eq!(
                    BigUint::from(ens.s_values[i]) * lam.z(),
                    lam.q() << (n - 1),
                    "n = {n}, lambda = {lam}"
                );
            }
        }
    }

    #[test]
    fn lambda_weights_total_to_count_times_factorial() {
        for n in 1..=10 {
            let total: BigUint = lambda_rows(n).iter().map(|r| &r.weight).sum();
            assert_eq!(total, tanglegram_count(n) * factorial(n));
        }
    }

    #[test]
    fn pair_measure_values_at_four_leaves() {
        let caps = Caps::default();
        let comp: CanonicalTree = "((L,L),(L,L))".parse().unwrap();
        let cat: CanonicalTree = "(L,(L,(L,L)))".parse().unwrap();
        assert_eq!(nu_p(&comp, &comp).unwrap(), rat(1, 25));
        assert_eq!(nu_p(&cat, &cat).unwrap(), rat(16, 25));
        assert_eq!(nu_t(&comp, &comp, &caps).unwrap(), rat(2, 13));
        assert_eq!(nu_t(&comp, &cat, &caps).unwrap(), rat(2, 13));
        assert_eq!(nu_t(&cat, &cat, &caps).unwrap(), rat(7, 13));
    }

    #[test]
    fn pair_measures_normalize() {
        let caps = Caps::default();
        for n in 2..=6 {
            let trees = enumerate_canonical_trees(n, &caps).unwrap();
            let mut sum_t = BigRational::zero();
            let mut sum_p = BigRational::zero();
            for a in trees.iter() {
                for b in trees.iter() {
                    sum_t += nu_t(a, b, &caps).unwrap();
                    sum_p += nu_p(a, b).unwrap();
                }
            }
            assert_eq!(sum_t, BigRational::one(), "n = {n}");
            assert_eq!(sum_p, BigRational::one(), "n = {n}");
        }
    }

    #[test]
    fn size_mismatch_is_rejected() {
        let caps = Caps::default();
        let a: CanonicalTree = "(L,L)".parse().unwrap();
        let b: CanonicalTree = "(L,(L,L))".parse().unwrap();
        assert!(matches!(nu_t(&a, &b, &caps), Err(Error::SizeMismatch { .. })));
        assert!(matches!(nu_p(&a, &b), Err(Error::SizeMismatch { .. })));
    }

    #[test]
    fn total_variation_at_four_leaves_by_hand() {
        let caps = Caps::default();
        assert_eq!(total_variation(4, &caps).unwrap(), rat(37, 325));
    }

    #[test]
    fn total_variation_trivial_cases() {
        let caps = Caps::default();
        // One tree class at n ≤ 3: the measures coincide only at n = 1
        // (a single plane tree too); at n = 3 the matching still skews
        // nothing because both classes are forced.
        assert_eq!(total_variation(1, &caps).unwrap(), BigRational::zero());
        assert_eq!(total_variation(2, &caps).unwrap(), BigRational::zero());
        assert_eq!(total_variation(3, &caps).unwrap(), BigRational::zero());
        assert!(total_variation(5, &caps).unwrap() > BigRational::zero());
    }

    #[test]
    fn total_variation_respects_pair_cap() {
        let caps = Caps {
            pair_table_leaves: 6,
            ..Caps::default()
        };
        assert!(matches!(
            total_variation(7, &caps),
            Err(Error::ResourceLimit { .. })
        ));
    }

    #[test]
    fn ratio_at_four_leaves_and_trend() {
        let r4 = asymptotic_ratio(4);
        assert!((r4 - 104.0 / 75.0).abs() < 1e-12);
        let limit = asymptotic_limit();
        let r10 = asymptotic_ratio(10);
        let r14 = asymptotic_ratio(14);
        assert!(r10 > r14 && r14 > limit);
        assert!((limit - 1.1331484530668263).abs() < 1e-15);
    }

    #[test]
    fn non_restricted_mass_small_cases() {
        assert_eq!(non_restricted_mass(2), BigRational::zero());
        assert_eq!(non_restricted_mass(3), BigRational::zero());
        assert_eq!(non_restricted_mass(4), rat(1, 52));
        let m10 = non_restricted_mass(10);
        assert!(m10 > BigRational::zero() && m10 < rat(1, 100));
    }

    #[test]
    fn cherry_mean_at_four_leaves_by_hand() {
        let caps = Caps::default();
        assert_eq!(tanglegram_cherry_mean(4, &caps).unwrap(), rat(17, 13));
    }

    #[test]
    fn cherry_mean_matches_direct_expectation() {
        // Direct route: Σ over pairs of ν_T(a,b)·cherries(a).
        let caps = Caps::default();
        for n in 2..=6 {
            let trees = enumerate_canonical_trees(n, &caps).unwrap();
            let mut direct = BigRational::zero();
            for a in trees.iter() {
                for b in trees.iter() {
                    direct += nu_t(a, b, &caps).unwrap() * BigRational::from(BigInt::from(a.cherries()));
                }
            }
            assert_eq!(tanglegram_cherry_mean(n, &caps).unwrap(), direct, "n = {n}");
        }
    }
}
