//! Distributional statistics: matched-cherry counts and their limit law,
//! subtree occurrence coefficients, root branch probabilities, the height
//! tail function, chi-square goodness of fit, and deterministic parallel
//! sampling reports.

use std::collections::HashSet;

use num::bigint::{BigInt, BigUint};
use num::rational::BigRational;
use num::{One, Signed, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::caps::Caps;
use crate::error::{Error, Result};
use crate::measures::{ensemble, tanglegram_cherry_mean, tanglegram_count};
use crate::perm::Permutations;
use crate::rng::Rng;
use crate::sampling::{ApproxSampler, ExactSampler, RemyBuf, Tanglegram};
use crate::spectrum::{aut_size, spectrum_pids};
use crate::tree::{catalan, enumerate_canonical_trees, CanonicalTree};
use crate::util::{binom, factorial, ratio, rational_f64};

/// Number of left cherries whose leaf pair is carried onto a right cherry by
/// the matching.
pub fn matched_cherries(tg: &Tanglegram) -> u32 {
    let right: HashSet<(u32, u32)> = tg.right().cherry_leaf_pairs().into_iter().collect();
    let m = tg.matching();
    let mut count = 0;
    for (a, b) in tg.left().cherry_leaf_pairs() {
        let x = m.apply(a as usize) as u32;
        let y = m.apply(b as usize) as u32;
        let key = if x < y { (x, y) } else { (y, x) };
        if right.contains(&key) {
            count += 1;
        }
    }
    count
}

/// Number of leaf bijections between a tree with `c1` cherries and a tree
/// with `c2` cherries (both on `n` leaves) that align exactly `k` cherry
/// pairs. Inclusion-exclusion over forced alignments:
///
///   C(c1,k) C(c2,k) k! 2^k · Σ_ℓ (-1)^ℓ C(c1-k,ℓ) C(c2-k,ℓ) ℓ! 2^ℓ (n-2k-2ℓ)!
pub fn matchings_with_k_matched(n: u64, c1: u64, c2: u64, k: u64) -> BigUint {
    assert!(2 * c1 <= n && 2 * c2 <= n, "a tree on n leaves has at most n/2 cherries");
    if k > c1.min(c2) {
        return BigUint::zero();
    }
    let prefix = binom(c1, k) * binom(c2, k) * factorial(k) * (BigUint::one() << k);
    let mut alternating = BigInt::zero();
    for l in 0..=(c1 - k).min(c2 - k) {
        let term = binom(c1 - k, l)
            * binom(c2 - k, l)
            * factorial(l)
            * (BigUint::one() << l)
            * factorial(n - 2 * k - 2 * l);
        let term = BigInt::from(term);
        if l % 2 == 0 {
            alternating += term;
        } else {
            alternating -= term;
        }
    }
    let total = BigInt::from(prefix) * alternating;
    assert!(!total.is_negative(), "alignment count came out negative");
    total.to_biguint().unwrap()
}

/// Exhaustive matched-cherry census over all n! leaf bijections between two
/// trees; entry k counts the bijections aligning exactly k cherry pairs.
/// Exponential in n, intended for n ≤ 8.
pub fn matched_histogram_brute(left: &CanonicalTree, right: &CanonicalTree) -> Result<Vec<u64>> {
    if left.leaves() != right.leaves() {
        return Err(Error::SizeMismatch {
            left: left.leaves() as usize,
            right: right.leaves() as usize,
        });
    }
    let n = left.leaves() as usize;
    let lp = left.cherry_leaf_pairs();
    let rp: HashSet<(u32, u32)> = right.cherry_leaf_pairs().into_iter().collect();
    let mut hist = vec![0u64; n / 2 + 1];
    for perm in Permutations::new(n) {
        let mut k = 0usize;
        for &(a, b) in &lp {
            let x = perm.apply(a as usize) as u32;
            let y = perm.apply(b as usize) as u32;
            let key = if x < y { (x, y) } else { (y, x) };
            if rp.contains(&key) {
                k += 1;
            }
        }
        hist[k] += 1;
    }
    Ok(hist)
}

/// Poisson(rate) probability mass at `k`.
pub fn poisson_pmf(k: u32, rate: f64) -> f64 {
    let mut p = (-rate).exp();
    for i in 1..=k {
        p *= rate / i as f64;
    }
    p
}

/// Per-leaf mean and variance coefficients for the number of nodes of a
/// uniform plane tree whose subtree is isomorphic to `b`: over trees with n
/// leaves the count has mean ~ mean·n and variance ~ var·n as n grows.
pub fn subtree_occurrence_params(b: &CanonicalTree) -> (BigRational, BigRational) {
    let size = b.leaves();
    let aut = aut_size(b);
    let mean = ratio(BigUint::one(), (BigUint::one() << (size - 1)) * &aut);
    let shrink = ratio(
        BigUint::from(2 * size - 1),
        (BigUint::one() << (2 * (size - 1))) * &aut * &aut,
    );
    let var = mean.clone() - shrink;
    (mean, var)
}

/// Probability that a uniform plane tree with `n` leaves has a root branch
/// isomorphic to `b`. Requires 2·|b| < n so that at most one branch can
/// match, making the two designated-branch events disjoint.
pub fn root_branch_probability(b: &CanonicalTree, n: u64) -> Result<BigRational> {
    let size = b.leaves();
    if 2 * size >= n {
        return Err(Error::Domain(format!(
            "root branch probability needs 2·|B| < n, got |B| = {size} and n = {n}"
        )));
    }
    let num = BigUint::from(2u32) * b.plane_embeddings() * catalan(n - size);
    Ok(ratio(num, catalan(n)))
}

/// Large-n limit of `root_branch_probability`.
pub fn root_branch_limit(b: &CanonicalTree) -> BigRational {
    ratio(BigUint::one(), (BigUint::one() << b.leaves()) * aut_size(b))
}

/// Limiting height tail of uniform plane trees at scale 2√n: the probability
/// that height ≥ 2x√n converges to this value as n grows.
///
/// Series Σ_{j≥1} e^(-j²x²)·(4j²x² - 2), truncated once a term drops below
/// 1e-16 of the running sum in magnitude, with a hard iteration guard.
pub fn theta_tail(x: f64) -> f64 {
    assert!(x > 0.0, "height tail needs x > 0");
    let mut sum = 0.0f64;
    for j in 1..=1_000_000u64 {
        let a2 = (j as f64) * (j as f64) * x * x;
        let term = (-a2).exp() * (4.0 * a2 - 2.0);
        sum += term;
        if term.abs() < 1e-16 * sum.abs() {
            break;
        }
    }
    sum
}

const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_93,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_13,
    -176.615_029_162_140_59,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_571_6e-6,
    1.505_632_735_149_311_6e-7,
];

/// Natural logarithm of the gamma function, for x > 0.
pub fn ln_gamma(x: f64) -> f64 {
    assert!(x > 0.0, "ln_gamma needs x > 0");
    if x < 0.5 {
        // Reflection keeps the Lanczos argument comfortably positive.
        let pi = std::f64::consts::PI;
        return (pi / (pi * x).sin()).ln() - ln_gamma(1.0 - x);
    }
    let z = x - 1.0;
    let mut acc = LANCZOS[0];
    for (i, c) in LANCZOS.iter().enumerate().skip(1) {
        acc += c / (z + i as f64);
    }
    let t = z + 7.5;
    0.5 * (2.0 * std::f64::consts::PI).ln() + (z + 0.5) * t.ln() - t + acc.ln()
}

/// Regularized lower incomplete gamma P(a, x) for a > 0, x ≥ 0. Series
/// expansion below x = a+1, Lentz continued fraction for the upper function
/// above it.
pub fn reg_gamma_p(a: f64, x: f64) -> f64 {
    assert!(a > 0.0 && x >= 0.0, "regularized gamma needs a > 0, x ≥ 0");
    if x == 0.0 {
        return 0.0;
    }
    let log_prefix = a * x.ln() - x - ln_gamma(a);
    if x < a + 1.0 {
        let mut term = 1.0 / a;
        let mut sum = term;
        let mut k = 1.0f64;
        while term.abs() > sum.abs() * 1e-16 && k < 1e6 {
            term *= x / (a + k);
            sum += term;
            k += 1.0;
        }
        (log_prefix.exp() * sum).min(1.0)
    } else {
        let tiny = 1e-300;
        let mut b = x + 1.0 - a;
        let mut c = 1.0 / tiny;
        let mut d = 1.0 / b;
        let mut h = d;
        for i in 1..10_000 {
            let an = -(i as f64) * (i as f64 - a);
            b += 2.0;
            d = an * d + b;
            if d.abs() < tiny {
                d = tiny;
            }
            c = b + an / c;
            if c.abs() < tiny {
                c = tiny;
            }
            d = 1.0 / d;
            let delta = d * c;
            h *= delta;
            if (delta - 1.0).abs() < 3e-16 {
                break;
            }
        }
        (1.0 - log_prefix.exp() * h).clamp(0.0, 1.0)
    }
}

/// Pearson chi-square statistic and upper-tail p-value for `observed` counts
/// against `expected` counts, with `observed.len() - 1` degrees of freedom.
pub fn chi_square_p(observed: &[u64], expected: &[f64]) -> Result<(f64, f64)> {
    if observed.len() != expected.len() {
        return Err(Error::SizeMismatch {
            left: observed.len(),
            right: expected.len(),
        });
    }
    if observed.len() < 2 {
        return Err(Error::Domain("chi-square needs at least two categories".into()));
    }
    if expected.iter().any(|&e| !(e > 0.0)) {
        return Err(Error::Domain("every expected count must be positive".into()));
    }
    let stat: f64 = observed
        .iter()
        .zip(expected)
        .map(|(&o, &e)| {
            let d = o as f64 - e;
            d * d / e
        })
        .sum();
    let df = (observed.len() - 1) as f64;
    let p = 1.0 - reg_gamma_p(df / 2.0, stat / 2.0);
    Ok((stat, p))
}

/// One plot row of a law report: a point, the empirical value there, and the
/// reference (exact or limiting) value.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LawRow {
    pub x: f64,
    pub empirical: f64,
    pub reference: f64,
}

/// Outcome of a sampling run compared against a reference law. `measure`
/// names the ensemble that was sampled.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LawReport {
    pub law: String,
    pub measure: String,
    pub n: u64,
    pub samples: u64,
    pub seed: u64,
    pub rows: Vec<LawRow>,
    pub summary: Vec<(String, f64)>,
}

/// Which sampler backs a law report.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SamplerKind {
    /// Uniform over tanglegrams.
    Exact,
    /// Independent uniform plane trees joined by a uniform leaf bijection.
    Approximate,
}

impl SamplerKind {
    fn measure_label(self) -> &'static str {
        match self {
            SamplerKind::Exact => "uniform-tanglegram",
            SamplerKind::Approximate => "plane-pair-product",
        }
    }
}

// Sampling work is split over a fixed grid of RNG streams, so reports are
// byte-identical regardless of thread count.
const LAW_CHUNKS: u64 = 64;

fn chunk_sizes(total: u64) -> Vec<u64> {
    let base = total / LAW_CHUNKS;
    let rem = total % LAW_CHUNKS;
    (0..LAW_CHUNKS).map(|i| base + u64::from(i < rem)).collect()
}

fn require_samples(samples: u64) -> Result<()> {
    if samples == 0 {
        return Err(Error::Domain("sample count must be positive".into()));
    }
    Ok(())
}

/// Empirical matched-cherry distribution from `samples` draws against the
/// Poisson(1/4) limit law.
pub fn matched_cherry_law(
    n: u64,
    samples: u64,
    seed: u64,
    kind: SamplerKind,
    caps: &Caps,
) -> Result<LawReport> {
    require_samples(samples)?;
    // Build one sampler up front: it surfaces cap errors before the parallel
    // stage and warms the shared tables.
    match kind {
        SamplerKind::Exact => drop(ExactSampler::with_stream(n, seed, 0, caps)?),
        SamplerKind::Approximate => drop(ApproxSampler::with_stream(n, seed, 0)?),
    }
    let sizes = chunk_sizes(samples);
    let hists = sizes
        .par_iter()
        .enumerate()
        .map(|(i, &cnt)| -> Result<Vec<u64>> {
            let mut hist = vec![0u64; (n / 2 + 1) as usize];
            match kind {
                SamplerKind::Exact => {
                    let mut s = ExactSampler::with_stream(n, seed, i as u64, caps)?;
                    for _ in 0..cnt {
                        hist[matched_cherries(&s.sample()) as usize] += 1;
                    }
                }
                SamplerKind::Approximate => {
                    let mut s = ApproxSampler::with_stream(n, seed, i as u64)?;
                    for _ in 0..cnt {
                        hist[s.sample_pair().matched_cherries() as usize] += 1;
                    }
                }
            }
            Ok(hist)
        })
        .collect::<Result<Vec<_>>>()?;
    let mut hist = vec![0u64; (n / 2 + 1) as usize];
    for h in hists {
        for (acc, v) in hist.iter_mut().zip(h) {
            *acc += v;
        }
    }
    let last = hist.iter().rposition(|&c| c > 0).unwrap_or(0);
    hist.truncate(last + 1);

    let total = samples as f64;
    let rows: Vec<LawRow> = hist
        .iter()
        .enumerate()
        .map(|(k, &c)| LawRow {
            x: k as f64,
            empirical: c as f64 / total,
            reference: poisson_pmf(k as u32, 0.25),
        })
        .collect();
    let mean = hist
        .iter()
        .enumerate()
        .map(|(k, &c)| k as f64 * c as f64)
        .sum::<f64>()
        / total;
    let summary = vec![
        ("mean".to_string(), mean),
        ("p_zero".to_string(), hist[0] as f64 / total),
        ("poisson_quarter_p_zero".to_string(), (-0.25f64).exp()),
        ("poisson_eighth_p_zero".to_string(), (-0.125f64).exp()),
    ];
    Ok(LawReport {
        law: "matched-cherries".into(),
        measure: kind.measure_label().into(),
        n,
        samples,
        seed,
        rows,
        summary,
    })
}

/// Grid used by default for height tail reports.
pub const HEIGHT_GRID: [f64; 4] = [0.5, 1.0, 1.5, 2.0];

/// Height statistics of uniform plane trees with `n` leaves: empirical tail
/// frequencies of height ≥ 2x√n on the grid `xs` against the limiting tail,
/// and the sampled mean against 2√(πn).
pub fn height_law(n: u64, samples: u64, seed: u64, xs: &[f64]) -> Result<LawReport> {
    require_samples(samples)?;
    if n == 0 {
        return Err(Error::Domain("tree size must be positive".into()));
    }
    if xs.is_empty() || xs.iter().any(|&x| !(x > 0.0)) {
        return Err(Error::Domain("height grid must be positive".into()));
    }
    let thresholds: Vec<f64> = xs.iter().map(|&x| 2.0 * x * (n as f64).sqrt()).collect();
    let sizes = chunk_sizes(samples);
    let parts: Vec<(Vec<u64>, u64)> = sizes
        .par_iter()
        .enumerate()
        .map(|(i, &cnt)| {
            let mut rng = Rng::with_stream(seed, i as u64);
            let mut tails = vec![0u64; thresholds.len()];
            let mut height_sum = 0u64;
            for _ in 0..cnt {
                let h = RemyBuf::sample(n, &mut rng).height();
                height_sum += h as u64;
                for (t, &thr) in tails.iter_mut().zip(&thresholds) {
                    if h as f64 >= thr {
                        *t += 1;
                    }
                }
            }
            (tails, height_sum)
        })
        .collect();
    let mut tails = vec![0u64; thresholds.len()];
    let mut height_sum = 0u64;
    for (t, s) in parts {
        for (acc, v) in tails.iter_mut().zip(t) {
            *acc += v;
        }
        height_sum += s;
    }
    let total = samples as f64;
    let rows: Vec<LawRow> = xs
        .iter()
        .zip(&tails)
        .map(|(&x, &c)| LawRow {
            x,
            empirical: c as f64 / total,
            reference: theta_tail(x),
        })
        .collect();
    let mean = height_sum as f64 / total;
    let mean_ref = 2.0 * (std::f64::consts::PI * n as f64).sqrt();
    let summary = vec![
        ("mean_height".to_string(), mean),
        ("mean_reference".to_string(), mean_ref),
        ("mean_ratio".to_string(), mean / mean_ref),
    ];
    Ok(LawReport {
        law: "height-tail".into(),
        measure: "uniform-plane-tree".into(),
        n,
        samples,
        seed,
        rows,
        summary,
    })
}

/// Exact distribution of the left tree's cherry count under the uniform
/// tanglegram measure on `n` leaves.
pub fn cherry_count_marginal(n: u64, caps: &Caps) -> Result<Vec<BigRational>> {
    let ens = ensemble(n, caps)?;
    let zs: Vec<BigUint> = ens
        .lambdas
        .iter()
        .zip(&ens.s_values)
        .map(|(lam, &s)| lam.z() * BigUint::from(s))
        .collect();
    let mut nums = vec![BigUint::zero(); (n / 2 + 1) as usize];
    for t in ens.trees.iter() {
        let shift = (n - 1) - t.generators() as u64;
        let mut acc = BigUint::zero();
        for &(p, c) in spectrum_pids(t).iter() {
            let li = ens
                .lambda_index(p)
                .expect("tree cycle type within the partition table");
            acc += &zs[li] * BigUint::from(c << shift);
        }
        nums[t.cherries() as usize] += acc;
    }
    let den = tanglegram_count(n) << (2 * (n - 1));
    Ok(nums.into_iter().map(|m| ratio(m, den.clone())).collect())
}

/// Left-tree cherry statistics under the uniform tanglegram measure at size
/// `n`: sampled histogram against the exact marginal, and the sampled mean
/// against the exact mean with a standard-error scale.
pub fn cherry_law(n: u64, samples: u64, seed: u64, caps: &Caps) -> Result<LawReport> {
    require_samples(samples)?;
    let marginal = cherry_count_marginal(n, caps)?;
    let exact_mean = rational_f64(&tanglegram_cherry_mean(n, caps)?);
    drop(ExactSampler::with_stream(n, seed, 0, caps)?);
    let sizes = chunk_sizes(samples);
    let parts: Vec<(Vec<u64>, u64, u64)> = sizes
        .par_iter()
        .enumerate()
        .map(|(i, &cnt)| -> Result<(Vec<u64>, u64, u64)> {
            let mut s = ExactSampler::with_stream(n, seed, i as u64, caps)?;
            let mut hist = vec![0u64; (n / 2 + 1) as usize];
            let (mut sum, mut sumsq) = (0u64, 0u64);
            for _ in 0..cnt {
                let c = s.sample().left().cherries() as u64;
                hist[c as usize] += 1;
                sum += c;
                sumsq += c * c;
            }
            Ok((hist, sum, sumsq))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut hist = vec![0u64; (n / 2 + 1) as usize];
    let (mut sum, mut sumsq) = (0u64, 0u64);
    for (h, s, sq) in parts {
        for (acc, v) in hist.iter_mut().zip(h) {
            *acc += v;
        }
        sum += s;
        sumsq += sq;
    }
    let total = samples as f64;
    let mean = sum as f64 / total;
    let var = if samples > 1 {
        (sumsq as f64 - total * mean * mean) / (total - 1.0)
    } else {
        0.0
    };
    let stderr = (var / total).sqrt();
    let rows: Vec<LawRow> = hist
        .iter()
        .enumerate()
        .map(|(c, &cnt)| LawRow {
            x: c as f64,
            empirical: cnt as f64 / total,
            reference: rational_f64(&marginal[c]),
        })
        .collect();
    let summary = vec![
        ("mean_empirical".to_string(), mean),
        ("mean_exact".to_string(), exact_mean),
        ("stderr".to_string(), stderr),
        (
            "z_score".to_string(),
            if stderr > 0.0 { (mean - exact_mean) / stderr } else { 0.0 },
        ),
    ];
    Ok(LawReport {
        law: "left-cherries".into(),
        measure: "uniform-tanglegram".into(),
        n,
        samples,
        seed,
        rows,
        summary,
    })
}

/// Exact mean number of symmetric internal nodes (both branches isomorphic)
/// of a uniform plane tree with `n` leaves.
pub fn plane_generator_mean(n: u64, caps: &Caps) -> Result<BigRational> {
    let trees = enumerate_canonical_trees(n, caps)?;
    let mut num = BigUint::zero();
    for t in trees.iter() {
        num += t.plane_embeddings() * BigUint::from(t.generators() as u64);
    }
    Ok(ratio(num, catalan(n)))
}
