//! Partitions whose parts are powers of two, with the centralizer weight z
//! and the suffix product q used throughout the enumeration formulas.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;
use std::sync::Mutex;

use num::{BigUint, One};
use once_cell::sync::Lazy;

use crate::error::{Error, Result};

/// A partition with all parts powers of two, stored as (exponent,
/// multiplicity) pairs with exponents strictly decreasing. `2,1,1` is
/// `[(1,1),(0,2)]`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BinaryPartition {
    mults: Vec<(u32, u64)>,
}

impl BinaryPartition {
    /// Partition of 1 (the single part 1).
    pub fn unit() -> BinaryPartition {
        BinaryPartition { mults: vec![(0, 1)] }
    }

    /// Build from an arbitrary part list; parts must be powers of two.
    pub fn from_parts(parts: &[u64]) -> Result<BinaryPartition> {
        let mut by_exp: Vec<(u32, u64)> = Vec::new();
        let mut sorted: Vec<u64> = parts.to_vec();
        sorted.sort_unstable_by(|a, b| b.cmp(a));
        for &p in &sorted {
            if p == 0 || !p.is_power_of_two() {
                return Err(Error::Domain(format!("part {p} is not a power of two")));
            }
            let e = p.trailing_zeros();
            match by_exp.last_mut() {
                Some((exp, m)) if *exp == e => *m += 1,
                _ => by_exp.push((e, 1)),
            }
        }
        if by_exp.is_empty() {
            return Err(Error::Domain("empty partition".into()));
        }
        Ok(BinaryPartition { mults: by_exp })
    }

    pub(crate) fn from_mults(mut mults: Vec<(u32, u64)>) -> BinaryPartition {
        mults.retain(|&(_, m)| m > 0);
        mults.sort_unstable_by(|a, b| b.0.cmp(&a.0));
        debug_assert!(!mults.is_empty());
        BinaryPartition { mults }
    }

    /// The partition 2^s 1^(n-2s).
    pub fn mu(s: u64, n: u64) -> Result<BinaryPartition> {
        if 2 * s > n {
            return Err(Error::Domain(format!("mu({s}) needs at least {} elements", 2 * s)));
        }
        let mut mults = Vec::new();
        if s > 0 {
            mults.push((1, s));
        }
        if n - 2 * s > 0 {
            mults.push((0, n - 2 * s));
        }
        if mults.is_empty() {
            return Err(Error::Domain("empty partition".into()));
        }
        Ok(BinaryPartition { mults })
    }

    /// Sum of all parts.
    pub fn n(&self) -> u64 {
        self.mults.iter().map(|&(e, m)| m << e).sum()
    }

    /// Number of parts.
    pub fn len(&self) -> u64 {
        self.mults.iter().map(|&(_, m)| m).sum()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Parts in weakly decreasing order.
    pub fn parts(&self) -> Vec<u64> {
        let mut out = Vec::with_capacity(self.len() as usize);
        for &(e, m) in &self.mults {
            for _ in 0..m {
                out.push(1u64 << e);
            }
        }
        out
    }

    /// (exponent, multiplicity) pairs, exponents strictly decreasing.
    pub fn mults(&self) -> &[(u32, u64)] {
        &self.mults
    }

    pub fn multiplicity_of_exp(&self, e: u32) -> u64 {
        self.mults
            .iter()
            .find(|&&(exp, _)| exp == e)
            .map_or(0, |&(_, m)| m)
    }

    /// True when every part is 1 or 2 (the dominant family mu(s)).
    pub fn is_restricted(&self) -> bool {
        self.mults.iter().all(|&(e, _)| e <= 1)
    }

    /// Number of parts equal to 2, when restricted.
    pub fn restricted_s(&self) -> Option<u64> {
        if self.is_restricted() {
            Some(self.multiplicity_of_exp(1))
        } else {
            None
        }
    }

    /// Every part doubled (cycle lengths under a branch swap).
    pub fn double(&self) -> BinaryPartition {
        BinaryPartition {
            mults: self.mults.iter().map(|&(e, m)| (e + 1, m)).collect(),
        }
    }

    /// Every part halved, if all parts are even.
    pub fn half(&self) -> Option<BinaryPartition> {
        if self.mults.iter().any(|&(e, _)| e == 0) {
            return None;
        }
        Some(BinaryPartition {
            mults: self.mults.iter().map(|&(e, m)| (e - 1, m)).collect(),
        })
    }

    /// Centralizer size z = prod_j (2^j)^{m_j} m_j!.
    pub fn z(&self) -> BigUint {
        let mut acc = BigUint::one();
        for &(e, m) in &self.mults {
            for i in 1..=m {
                acc *= BigUint::from(i);
            }
            acc <<= (e as u64) * m;
        }
        acc
    }

    /// Suffix product q = prod_{i>=2} (2(lambda_i + .. + lambda_l) - 1) over
    /// weakly decreasing parts; empty product for a single part.
    pub fn q(&self) -> BigUint {
        let parts = self.parts();
        let mut acc = BigUint::one();
        let mut suffix: u64 = 0;
        for &p in parts.iter().skip(1).rev() {
            suffix += p;
            acc *= BigUint::from(2 * suffix - 1);
        }
        acc
    }

    /// All splits of `self` into (alpha, beta) with alpha a sub-multiset
    /// summing to `n1` and beta the complement. Deterministic order.
    pub fn splits(&self, n1: u64) -> Vec<(BinaryPartition, BinaryPartition)> {
        let n = self.n();
        if n1 == 0 || n1 >= n {
            return Vec::new();
        }
        let mut out = Vec::new();
        let mut taken: Vec<u64> = vec![0; self.mults.len()];
        fn rec(
            mults: &[(u32, u64)],
            idx: usize,
            remaining: u64,
            taken: &mut Vec<u64>,
            out: &mut Vec<(BinaryPartition, BinaryPartition)>,
        ) {
            if remaining == 0 {
                let alpha: Vec<(u32, u64)> = mults
                    .iter()
                    .zip(taken.iter())
                    .map(|(&(e, _), &t)| (e, t))
                    .collect();
                let beta: Vec<(u32, u64)> = mults
                    .iter()
                    .zip(taken.iter())
                    .map(|(&(e, m), &t)| (e, m - t))
                    .collect();
                out.push((
                    BinaryPartition::from_mults(alpha),
                    BinaryPartition::from_mults(beta),
                ));
                return;
            }
            if idx == mults.len() {
                return;
            }
            let (e, m) = mults[idx];
            let part = 1u64 << e;
            let max_take = m.min(remaining / part);
            for take in (0..=max_take).rev() {
                taken[idx] = take;
                rec(mults, idx + 1, remaining - take * part, taken, out);
            }
            taken[idx] = 0;
        }
        rec(&self.mults, 0, n1, &mut taken, &mut out);
        // Drop splits that emptied either side (taken everything or nothing).
        out.retain(|(a, b)| a.n() == n1 && b.n() == n - n1);
        out
    }
}

impl fmt::Display for BinaryPartition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, p) in self.parts().iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{p}")?;
        }
        Ok(())
    }
}

impl FromStr for BinaryPartition {
    type Err = Error;

    fn from_str(s: &str) -> Result<BinaryPartition> {
        let mut parts = Vec::new();
        let mut offset = 0usize;
        for field in s.split(',') {
            let trimmed = field.trim();
            let p: u64 = trimmed
                .parse()
                .map_err(|_| Error::parse(offset, format!("expected integer, found {trimmed:?}")))?;
            if p == 0 || !p.is_power_of_two() {
                return Err(Error::parse(offset, format!("part {p} is not a power of two")));
            }
            parts.push(p);
            offset += field.len() + 1;
        }
        BinaryPartition::from_parts(&parts)
    }
}

/// All binary partitions of n, in descending lexicographic order of the part
/// list: for n = 4 that is `4`, `2,2`, `2,1,1`, `1,1,1,1`.
pub fn binary_partitions(n: u64) -> Vec<BinaryPartition> {
    assert!(n >= 1, "partitions of 0 are not used anywhere");
    let mut out = Vec::new();
    let mut stack: Vec<(u32, u64)> = Vec::new();
    fn rec(remaining: u64, max_exp: u32, stack: &mut Vec<(u32, u64)>, out: &mut Vec<BinaryPartition>) {
        if remaining == 0 {
            out.push(BinaryPartition::from_mults(stack.clone()));
            return;
        }
        let mut e = max_exp;
        while (1u64 << e) > remaining {
            e -= 1;
        }
        loop {
            let part = 1u64 << e;
            let max_count = remaining / part;
            for count in (1..=max_count).rev() {
                stack.push((e, count));
                rec(remaining - count * part, e.saturating_sub(1), stack, out);
                stack.pop();
                if e == 0 {
                    // Multiplicity of 1 is forced to the full remainder.
                    break;
                }
            }
            if e == 0 {
                break;
            }
            e -= 1;
        }
    }
    let top = 63 - n.leading_zeros();
    rec(n, top, &mut stack, &mut out);
    out
}

// Process-wide intern table. Spectra index partitions by these ids; ids are
// stable within a process and never serialized.
pub(crate) type Pid = u16;

struct PartitionTable {
    list: Vec<BinaryPartition>,
    index: HashMap<BinaryPartition, Pid>,
    union: HashMap<(Pid, Pid), Pid>,
    double: HashMap<Pid, Pid>,
}

static TABLE: Lazy<Mutex<PartitionTable>> = Lazy::new(|| {
    Mutex::new(PartitionTable {
        list: Vec::new(),
        index: HashMap::new(),
        union: HashMap::new(),
        double: HashMap::new(),
    })
});

impl PartitionTable {
    fn intern(&mut self, p: &BinaryPartition) -> Pid {
        if let Some(&id) = self.index.get(p) {
            return id;
        }
        let id = Pid::try_from(self.list.len()).expect("partition intern table overflow");
        self.list.push(p.clone());
        self.index.insert(p.clone(), id);
        id
    }
}

pub(crate) fn pid_of(p: &BinaryPartition) -> Pid {
    TABLE.lock().unwrap().intern(p)
}

pub(crate) fn partition_of(pid: Pid) -> BinaryPartition {
    TABLE.lock().unwrap().list[pid as usize].clone()
}

/// Union (multiset sum) of two interned partitions.
pub(crate) fn pid_union(a: Pid, b: Pid) -> Pid {
    let mut tbl = TABLE.lock().unwrap();
    let key = if a <= b { (a, b) } else { (b, a) };
    if let Some(&id) = tbl.union.get(&key) {
        return id;
    }
    let pa = tbl.list[key.0 as usize].clone();
    let pb = tbl.list[key.1 as usize].clone();
    let mut mults: HashMap<u32, u64> = HashMap::new();
    for &(e, m) in pa.mults().iter().chain(pb.mults().iter()) {
        *mults.entry(e).or_insert(0) += m;
    }
    let merged = BinaryPartition::from_mults(mults.into_iter().collect());
    let id = tbl.intern(&merged);
    tbl.union.insert(key, id);
    id
}

/// The doubled partition of an interned partition.
pub(crate) fn pid_double(a: Pid) -> Pid {
    let mut tbl = TABLE.lock().unwrap();
    if let Some(&id) = tbl.double.get(&a) {
        return id;
    }
    let doubled = tbl.list[a as usize].double();
    let id = tbl.intern(&doubled);
    tbl.double.insert(a, id);
    id
}

#[cfg(test)]
mod tests {
    use super::*;

    // Independent count of partitions into powers of two:
    // b(2k+1) = b(2k), b(2k) = b(2k-1) + b(k).
    fn count_binary_partitions(n: u64) -> u64 {
        let mut b = vec![1u64; (n + 1) as usize];
        for m in 1..=n as usize {
            b[m] = if m % 2 == 1 { b[m - 1] } else { b[m - 1] + b[m / 2] };
        }
        b[n as usize]
    }

    #[test]
    fn partitions_of_four_in_descending_lex_order() {
        let ps: Vec<String> = binary_partitions(4).iter().map(|p| p.to_string()).collect();
        assert_eq!(ps, vec!["4", "2,2", "2,1,1", "1,1,1,1"]);
    }

    #[test]
    fn partitions_of_one() {
        let ps = binary_partitions(1);
        assert_eq!(ps.len(), 1);
        assert_eq!(ps[0], BinaryPartition::unit());
    }

    #[test]
    fn generation_matches_recurrence_count() {
        for n in 1..=40 {
            assert_eq!(
                binary_partitions(n).len() as u64,
                count_binary_partitions(n),
                "count mismatch at n={n}"
            );
        }
    }

    #[test]
    fn ten_has_fourteen_partitions() {
        assert_eq!(binary_partitions(10).len(), 14);
    }

    #[test]
    fn all_generated_partitions_are_valid_and_distinct() {
        for n in 1..=24u64 {
            let ps = binary_partitions(n);
            for p in &ps {
                assert_eq!(p.n(), n);
                assert!(p.parts().windows(2).all(|w| w[0] >= w[1]));
            }
            let mut dedup = ps.clone();
            dedup.sort();
            dedup.dedup();
            assert_eq!(dedup.len(), ps.len());
        }
    }

    #[test]
    fn z_values() {
        let p = |s: &str| s.parse::<BinaryPartition>().unwrap();
        assert_eq!(p("1,1,1,1").z(), BigUint::from(24u32));
        assert_eq!(p("2,2").z(), BigUint::from(8u32));
        assert_eq!(p("2,1,1").z(), BigUint::from(4u32));
        assert_eq!(p("4").z(), BigUint::from(4u32));
        // z(mu(s)) = 2^s s! (n-2s)! with n = 6, s = 2: 4*2*2 = 16.
        assert_eq!(BinaryPartition::mu(2, 6).unwrap().z(), BigUint::from(16u32));
    }

    #[test]
    fn q_values() {
        let p = |s: &str| s.parse::<BinaryPartition>().unwrap();
        assert_eq!(p("1,1,1,1").q(), BigUint::from(15u32));
        assert_eq!(p("2,1,1").q(), BigUint::from(3u32));
        assert_eq!(p("2,2").q(), BigUint::from(3u32));
        assert_eq!(p("4").q(), BigUint::from(1u32));
        assert_eq!(p("1").q(), BigUint::from(1u32));
    }

    #[test]
    fn display_parse_round_trip() {
        for n in 1..=16 {
            for p in binary_partitions(n) {
                let back: BinaryPartition = p.to_string().parse().unwrap();
                assert_eq!(back, p);
            }
        }
        assert!("3".parse::<BinaryPartition>().is_err());
        assert!("0".parse::<BinaryPartition>().is_err());
        assert!("2,x".parse::<BinaryPartition>().is_err());
    }

    #[test]
    fn double_and_half_are_inverse() {
        let p: BinaryPartition = "2,1,1".parse().unwrap();
        assert_eq!(p.double().to_string(), "4,2,2");
        assert_eq!(p.double().half().unwrap(), p);
        assert!(p.half().is_none());
    }

    #[test]
    fn splits_cover_all_submultisets_of_given_size() {
        let p: BinaryPartition = "2,2,1,1".parse().unwrap();
        let splits = p.splits(3);
        // alpha must sum to 3: {2,1} only (multiplicity of choices collapses).
        assert_eq!(splits.len(), 1);
        assert_eq!(splits[0].0.to_string(), "2,1");
        assert_eq!(splits[0].1.to_string(), "2,1");

        let q: BinaryPartition = "1,1,1,1".parse().unwrap();
        assert_eq!(q.splits(2).len(), 1);
        assert!(q.splits(0).is_empty());
        assert!(q.splits(4).is_empty());
    }

    #[test]
    fn intern_table_union_and_double() {
        let a = pid_of(&"2,1".parse().unwrap());
        let b = pid_of(&"1".parse().unwrap());
        let u = pid_union(a, b);
        assert_eq!(partition_of(u).to_string(), "2,1,1");
        let d = pid_double(a);
        assert_eq!(partition_of(d).to_string(), "4,2");
        // Interning is idempotent.
        assert_eq!(a, pid_of(&"2,1".parse().unwrap()));
    }

    #[test]
    fn mu_rejects_oversized_s() {
        assert!(BinaryPartition::mu(3, 5).is_err());
        assert_eq!(BinaryPartition::mu(2, 5).unwrap().to_string(), "2,2,1");
    }
}
