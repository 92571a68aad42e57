//! Generating-series table for subtree occurrences in uniform plane trees.
//!
//! For a fixed branch class B with b ≥ 2 leaves and m plane embeddings, the
//! bivariate series Y(x, u) = Σ y[n][k] u^k x^n counting plane trees by
//! leaves (x) and occurrences of B as a node subtree (u) satisfies
//!
//!   Y = x + Y² + (u - 1)·m·x^b
//!
//! because a root decomposition double-counts nothing, and the only node
//! whose subtree can be in class B without lying in a branch is the root of
//! a size-b tree, which carries exactly one occurrence. Setting u = 1
//! recovers the plane-tree series.

use num::bigint::{BigInt, BigUint};
use num::rational::BigRational;
use num::{One, Zero};

use crate::caps::Caps;
use crate::error::{Error, Result};
use crate::tree::{catalan, CanonicalTree};
use crate::util::ratio;

/// Coefficient table of the occurrence series up to a leaf-count order.
/// `counts(n)[k]` is the number of plane trees with n leaves containing the
/// branch class at exactly k nodes.
pub struct OccurrenceSeries {
    branch_leaves: u64,
    embeddings: BigUint,
    order: u64,
    rows: Vec<Vec<BigUint>>,
}

impl OccurrenceSeries {
    /// Expand the series for `branch` up to x^order. The branch needs at
    /// least two leaves: a leaf occurs once per leaf position, so its count
    /// is deterministic and carries no series content.
    pub fn new(branch: &CanonicalTree, order: u64, caps: &Caps) -> Result<OccurrenceSeries> {
        let b = branch.leaves();
        if b < 2 {
            return Err(Error::Domain(
                "occurrence series needs a branch with at least two leaves".into(),
            ));
        }
        if order > caps.series_order as u64 {
            return Err(Error::resource("series order", order, caps.series_order));
        }
        let m = branch.plane_embeddings();
        // rows[n][k]; row 0 stays empty as a placeholder.
        let mut rows: Vec<Vec<BigUint>> = vec![Vec::new(); (order + 1) as usize];
        if order >= 1 {
            rows[1] = vec![BigUint::one()];
        }
        for n in 2..=order {
            let kmax = (n / b) as usize;
            let mut row = vec![BigUint::zero(); kmax + 1];
            for i in 1..n {
                let (a, c) = (&rows[i as usize], &rows[(n - i) as usize]);
                for (ka, va) in a.iter().enumerate() {
                    if va.is_zero() {
                        continue;
                    }
                    for (kc, vc) in c.iter().enumerate() {
                        if vc.is_zero() {
                            continue;
                        }
                        row[ka + kc] += va * vc;
                    }
                }
            }
            if n == b {
                // The root itself is an occurrence for each of the m plane
                // trees in the class; move their weight from k=0 to k=1.
                row[0] -= &m;
                if row.len() < 2 {
                    row.push(BigUint::zero());
                }
                row[1] += &m;
            }
            rows[n as usize] = row;
        }
        Ok(OccurrenceSeries {
            branch_leaves: b,
            embeddings: m,
            order,
            rows,
        })
    }

    pub fn order(&self) -> u64 {
        self.order
    }

    pub fn branch_leaves(&self) -> u64 {
        self.branch_leaves
    }

    pub fn embeddings(&self) -> &BigUint {
        &self.embeddings
    }

    /// Occurrence counts at n leaves, indexed by occurrence number.
    pub fn counts(&self, n: u64) -> Result<&[BigUint]> {
        if n == 0 || n > self.order {
            return Err(Error::Domain(format!(
                "series holds orders 1..={}, asked for {n}",
                self.order
            )));
        }
        Ok(&self.rows[n as usize])
    }

    /// Row total; must equal the plane-tree count.
    pub fn total(&self, n: u64) -> Result<BigUint> {
        Ok(self.counts(n)?.iter().sum())
    }

    /// Exact occurrence distribution at n leaves under the uniform plane
    /// tree measure.
    pub fn pmf(&self, n: u64) -> Result<Vec<BigRational>> {
        let cat = catalan(n);
        Ok(self
            .counts(n)?
            .iter()
            .map(|c| ratio(c.clone(), cat.clone()))
            .collect())
    }

    /// Exact mean occurrence count at n leaves.
    pub fn mean(&self, n: u64) -> Result<BigRational> {
        let num: BigUint = self
            .counts(n)?
            .iter()
            .enumerate()
            .map(|(k, c)| c * BigUint::from(k))
            .sum();
        Ok(ratio(num, catalan(n)))
    }

    /// Exact occurrence variance at n leaves.
    pub fn variance(&self, n: u64) -> Result<BigRational> {
        let sq: BigUint = self
            .counts(n)?
            .iter()
            .enumerate()
            .map(|(k, c)| c * BigUint::from(k * k))
            .sum();
        let mean = self.mean(n)?;
        Ok(ratio(sq, catalan(n)) - &mean * &mean)
    }
}

/// Exact mean cherry count of a uniform plane tree: n(n-1)/(4n-6) for n ≥ 2.
pub fn plane_cherry_mean(n: u64) -> BigRational {
    if n < 2 {
        return BigRational::from(BigInt::zero());
    }
    ratio(BigUint::from(n * (n - 1)), BigUint::from(4 * n - 6))
}
