//! Exact and randomized analysis of tanglegrams: pairs of rooted binary
//! trees on the same leaf set joined by a matching, considered up to
//! isomorphism of the pair.
//!
//! The crate enumerates tree shapes and tanglegram classes, counts them with
//! exact big-integer arithmetic, samples them uniformly (exactly, or
//! approximately via independent plane trees), and measures how sampled
//! statistics track their exact finite-size values and limit laws. All
//! randomized entry points are deterministic given a seed, including under
//! parallel execution.
//!
//! Module map:
//! - [`tree`]: plane and canonical (unordered) binary trees, enumeration,
//!   Catalan / shape counting.
//! - [`partition`]: binary partitions (cycle types of tree automorphisms)
//!   and their statistics.
//! - [`spectrum`]: automorphism counts of a tree by cycle type.
//! - [`measures`]: exact tanglegram counts, the two measures on tree pairs,
//!   total-variation distance, asymptotic ratios.
//! - [`sampling`]: uniform tanglegram sampler and the plane-pair sampler.
//! - [`stats`]: matched cherries, occurrence and branch statistics, height
//!   tail, chi-square, deterministic parallel law reports.
//! - [`series`]: occurrence generating series for subtree classes.
//! - [`gamma`]: the symmetric-node density constant.
//! - [`oracle`]: brute-force enumeration ground truth at small sizes.

pub mod caps;
pub mod error;
pub mod gamma;
pub mod measures;
pub mod oracle;
pub mod partition;
pub mod perm;
pub mod rng;
pub mod sampling;
pub mod series;
pub mod spectrum;
pub mod stats;
pub mod tree;
pub mod util;

pub use caps::Caps;
pub use error::{Error, Result};
pub use gamma::{gamma_constant, gamma_digits};
pub use measures::{
    asymptotic_limit, asymptotic_ratio, lambda_rows, non_restricted_mass, nu_p, nu_t,
    tanglegram_cherry_mean, tanglegram_count, tanglegram_count_tree_sum, total_variation,
    LambdaRow,
};
pub use oracle::{
    automorphism_audit, canonicalize_tanglegram, enumerate_automorphisms, enumerate_tanglegrams,
    exact_matched_cherry_distribution, is_automorphism, pair_stabilizer_size,
    plane_representation_counts, triple_weight_total, AuditRow, AutomorphismAudit,
};
pub use partition::{binary_partitions, BinaryPartition};
pub use perm::{Perm, Permutations};
pub use rng::Rng;
pub use sampling::{sample_plane_tree, ApproxSampler, ExactSampler, Tanglegram};
pub use series::{plane_cherry_mean, OccurrenceSeries};
pub use spectrum::{aut_size, cycle_spectrum, involution_counts, CycleSpectrum};
pub use stats::{
    cherry_count_marginal, cherry_law, chi_square_p, height_law, ln_gamma, matched_cherries,
    matched_cherry_law, matched_histogram_brute, matchings_with_k_matched, plane_generator_mean,
    poisson_pmf, reg_gamma_p, root_branch_limit, root_branch_probability,
    subtree_occurrence_params, theta_tail, LawReport, LawRow, SamplerKind, HEIGHT_GRID,
};
pub use util::{big_ratio_f64, rational_f64};
pub use tree::{
    canonicalize, canonicalize_with_leaf_perm, catalan, enumerate_canonical_trees,
    enumerate_plane_trees, shape_stats, wedderburn_etherington, CanonicalTree, PlaneTree,
    ShapeStats,
};
