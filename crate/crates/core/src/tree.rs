//! Rooted binary trees in two forms: `PlaneTree` keeps the embedding (left
//! and right children are distinguished), `CanonicalTree` is the
//! isomorphism-class representative with branches in canonical order.
//!
//! Canonical trees are hash-consed in a process-wide intern table, so
//! equality is pointer equality and per-tree caches (spectra, restricted
//! polynomials) can key on a stable id. Leaves are labeled 1..n in
//! depth-first order wherever permutations act on a tree.

use std::cmp::Ordering;
use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::str::FromStr;
use std::sync::atomic::{AtomicU64, Ordering as AtomicOrdering};
use std::sync::{Arc, Mutex};

use num::{BigUint, One, Zero};
use once_cell::sync::Lazy;

use crate::caps::Caps;
use crate::error::{Error, Result};
use crate::perm::Perm;

// ---------------------------------------------------------------------------
// Plane trees
// ---------------------------------------------------------------------------

/// A plane (embedded) rooted binary tree; every internal node has exactly
/// two ordered children.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum PlaneTree {
    Leaf,
    Node(Box<PlaneTree>, Box<PlaneTree>),
}

impl PlaneTree {
    pub fn leaf() -> PlaneTree {
        PlaneTree::Leaf
    }

    pub fn node(left: PlaneTree, right: PlaneTree) -> PlaneTree {
        PlaneTree::Node(Box::new(left), Box::new(right))
    }

    pub fn is_leaf(&self) -> bool {
        matches!(self, PlaneTree::Leaf)
    }

    /// Number of leaves.
    pub fn leaves(&self) -> u64 {
        // Iterative: plane trees from the samplers can be deep.
        let mut count = 0u64;
        let mut stack = vec![self];
        while let Some(t) = stack.pop() {
            match t {
                PlaneTree::Leaf => count += 1,
                PlaneTree::Node(l, r) => {
                    stack.push(l);
                    stack.push(r);
                }
            }
        }
        count
    }

    /// Edge count of the longest root-to-leaf path.
    pub fn height(&self) -> u32 {
        let mut best = 0u32;
        let mut stack = vec![(self, 0u32)];
        while let Some((t, d)) = stack.pop() {
            match t {
                PlaneTree::Leaf => best = best.max(d),
                PlaneTree::Node(l, r) => {
                    stack.push((l, d + 1));
                    stack.push((r, d + 1));
                }
            }
        }
        best
    }

    /// Internal nodes whose children are both leaves.
    pub fn cherries(&self) -> u32 {
        let mut count = 0u32;
        let mut stack = vec![self];
        while let Some(t) = stack.pop() {
            if let PlaneTree::Node(l, r) = t {
                if l.is_leaf() && r.is_leaf() {
                    count += 1;
                } else {
                    stack.push(l);
                    stack.push(r);
                }
            }
        }
        count
    }

    pub fn children(&self) -> Option<(&PlaneTree, &PlaneTree)> {
        match self {
            PlaneTree::Leaf => None,
            PlaneTree::Node(l, r) => Some((l, r)),
        }
    }
}

impl fmt::Display for PlaneTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PlaneTree::Leaf => f.write_str("L"),
            PlaneTree::Node(l, r) => write!(f, "({l},{r})"),
        }
    }
}

impl FromStr for PlaneTree {
    type Err = Error;

    fn from_str(s: &str) -> Result<PlaneTree> {
        let bytes = s.as_bytes();
        let mut pos = 0usize;
        let tree = parse_tree(bytes, &mut pos)?;
        skip_ws(bytes, &mut pos);
        if pos != bytes.len() {
            return Err(Error::parse(pos, "trailing input after tree"));
        }
        Ok(tree)
    }
}

fn skip_ws(bytes: &[u8], pos: &mut usize) {
    while *pos < bytes.len() && bytes[*pos].is_ascii_whitespace() {
        *pos += 1;
    }
}

fn parse_tree(bytes: &[u8], pos: &mut usize) -> Result<PlaneTree> {
    skip_ws(bytes, pos);
    match bytes.get(*pos) {
        Some(b'L') => {
            *pos += 1;
            Ok(PlaneTree::Leaf)
        }
        Some(b'(') => {
            *pos += 1;
            let left = parse_tree(bytes, pos)?;
            skip_ws(bytes, pos);
            if bytes.get(*pos) != Some(&b',') {
                return Err(Error::parse(*pos, "expected ','"));
            }
            *pos += 1;
            let right = parse_tree(bytes, pos)?;
            skip_ws(bytes, pos);
            if bytes.get(*pos) != Some(&b')') {
                return Err(Error::parse(*pos, "expected ')'"));
            }
            *pos += 1;
            Ok(PlaneTree::node(left, right))
        }
        Some(&c) => Err(Error::parse(
            *pos,
            format!("expected 'L' or '(', found {:?}", c as char),
        )),
        None => Err(Error::parse(*pos, "unexpected end of input")),
    }
}

// ---------------------------------------------------------------------------
// Counting sequences
// ---------------------------------------------------------------------------

/// Number of plane binary trees with n leaves: C_n = binom(2n-2, n-1)/n.
/// Starts 1, 1, 2, 5, 14, 42 from n = 1.
pub fn catalan(n: u64) -> BigUint {
    static MEMO: Lazy<Mutex<Vec<BigUint>>> = Lazy::new(|| Mutex::new(vec![BigUint::zero(), BigUint::one()]));
    let mut memo = MEMO.lock().unwrap();
    while (memo.len() as u64) <= n {
        let m = memo.len() as u64;
        // C_m = C_{m-1} * (4m - 6) / m for m >= 2.
        let prev = memo.last().unwrap().clone();
        let next = prev * BigUint::from(4 * m - 6) / BigUint::from(m);
        memo.push(next);
    }
    memo[n as usize].clone()
}

/// Number of binary trees with n leaves up to isomorphism.
/// Starts 1, 1, 1, 2, 3, 6, 11, 23 from n = 1.
pub fn wedderburn_etherington(n: u64) -> BigUint {
    static MEMO: Lazy<Mutex<Vec<BigUint>>> = Lazy::new(|| Mutex::new(vec![BigUint::zero(), BigUint::one()]));
    let mut memo = MEMO.lock().unwrap();
    while (memo.len() as u64) <= n {
        let m = memo.len() as u64;
        let mut acc = BigUint::zero();
        for i in 1..=(m - 1) / 2 {
            acc += &memo[i as usize] * &memo[(m - i) as usize];
        }
        if m % 2 == 0 {
            let h = &memo[(m / 2) as usize];
            acc += h * (h + BigUint::one()) / BigUint::from(2u32);
        }
        memo.push(acc);
    }
    memo[n as usize].clone()
}

// ---------------------------------------------------------------------------
// Canonical trees (hash-consed)
// ---------------------------------------------------------------------------

struct CanonNode {
    size: u32,
    generators: u32,
    cherries: u32,
    height: u32,
    uid: u64,
    children: Option<(CanonicalTree, CanonicalTree)>,
}

/// An isomorphism class of rooted binary trees. The stored embedding is the
/// canonical one: at every internal node the first branch precedes the
/// second in canonical order (size first, then recursive comparison).
#[derive(Clone)]
pub struct CanonicalTree(Arc<CanonNode>);

struct Interner {
    leaf: CanonicalTree,
    nodes: Mutex<HashMap<(u64, u64), CanonicalTree>>,
    next_uid: AtomicU64,
}

static INTERNER: Lazy<Interner> = Lazy::new(|| Interner {
    leaf: CanonicalTree(Arc::new(CanonNode {
        size: 1,
        generators: 0,
        cherries: 0,
        height: 0,
        uid: 0,
        children: None,
    })),
    nodes: Mutex::new(HashMap::new()),
    next_uid: AtomicU64::new(1),
});

impl CanonicalTree {
    pub fn leaf() -> CanonicalTree {
        INTERNER.leaf.clone()
    }

    /// Join two classes; the branches are stored in canonical order, so the
    /// argument order does not matter.
    pub fn node(a: CanonicalTree, b: CanonicalTree) -> CanonicalTree {
        let (first, second) = if canonical_cmp(&a, &b) == Ordering::Greater {
            (b, a)
        } else {
            (a, b)
        };
        let key = (first.uid(), second.uid());
        let mut nodes = INTERNER.nodes.lock().unwrap();
        if let Some(t) = nodes.get(&key) {
            return t.clone();
        }
        let same = first.uid() == second.uid();
        let node = CanonNode {
            size: first.0.size + second.0.size,
            generators: if same {
                2 * first.0.generators + 1
            } else {
                first.0.generators + second.0.generators
            },
            cherries: if first.is_leaf() && second.is_leaf() {
                1
            } else {
                first.0.cherries + second.0.cherries
            },
            height: 1 + first.0.height.max(second.0.height),
            uid: INTERNER.next_uid.fetch_add(1, AtomicOrdering::Relaxed),
            children: Some((first, second)),
        };
        let tree = CanonicalTree(Arc::new(node));
        nodes.insert(key, tree.clone());
        tree
    }

    pub fn is_leaf(&self) -> bool {
        self.0.children.is_none()
    }

    pub fn leaves(&self) -> u64 {
        self.0.size as u64
    }

    /// Number of symmetric internal nodes; |A(T)| = 2^generators.
    pub fn generators(&self) -> u32 {
        self.0.generators
    }

    pub fn cherries(&self) -> u32 {
        self.0.cherries
    }

    /// Edge count of the longest root-to-leaf path.
    pub fn height(&self) -> u32 {
        self.0.height
    }

    pub fn children(&self) -> Option<(&CanonicalTree, &CanonicalTree)> {
        self.0.children.as_ref().map(|(a, b)| (a, b))
    }

    pub(crate) fn uid(&self) -> u64 {
        self.0.uid
    }

    /// Number of plane trees in this isomorphism class: 2^(n-1-generators).
    pub fn plane_embeddings(&self) -> BigUint {
        BigUint::one() << (self.0.size - 1 - self.0.generators) as u64
    }

    /// The canonical embedding as a plane tree.
    pub fn to_plane(&self) -> PlaneTree {
        match self.children() {
            None => PlaneTree::Leaf,
            Some((a, b)) => PlaneTree::node(a.to_plane(), b.to_plane()),
        }
    }

    /// DF-order leaf index pairs of the cherries, 0-based.
    pub(crate) fn cherry_leaf_pairs(&self) -> Vec<(u32, u32)> {
        let mut out = Vec::new();
        fn walk(t: &CanonicalTree, offset: u32, out: &mut Vec<(u32, u32)>) {
            if let Some((a, b)) = t.children() {
                if a.is_leaf() && b.is_leaf() {
                    out.push((offset, offset + 1));
                } else {
                    walk(a, offset, out);
                    walk(b, offset + a.0.size, out);
                }
            }
        }
        walk(self, 0, &mut out);
        out
    }
}

impl PartialEq for CanonicalTree {
    fn eq(&self, other: &Self) -> bool {
        self.0.uid == other.0.uid
    }
}

impl Eq for CanonicalTree {}

impl std::hash::Hash for CanonicalTree {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.0.uid.hash(state);
    }
}

impl PartialOrd for CanonicalTree {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for CanonicalTree {
    fn cmp(&self, other: &Self) -> Ordering {
        canonical_cmp(self, other)
    }
}

impl fmt::Debug for CanonicalTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "CanonicalTree({self})")
    }
}

impl fmt::Display for CanonicalTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.children() {
            None => f.write_str("L"),
            Some((a, b)) => write!(f, "({a},{b})"),
        }
    }
}

impl FromStr for CanonicalTree {
    type Err = Error;

    fn from_str(s: &str) -> Result<CanonicalTree> {
        Ok(canonicalize(&s.parse::<PlaneTree>()?))
    }
}

/// Total order on isomorphism classes: by size, then by (first, second)
/// branch recursively; leaves come first. Structural, so it is stable
/// across processes.
pub fn canonical_cmp(a: &CanonicalTree, b: &CanonicalTree) -> Ordering {
    if a.0.uid == b.0.uid {
        return Ordering::Equal;
    }
    a.0.size.cmp(&b.0.size).then_with(|| {
        match (a.children(), b.children()) {
            (None, None) => Ordering::Equal,
            (Some((a1, a2)), Some((b1, b2))) => {
                canonical_cmp(a1, b1).then_with(|| canonical_cmp(a2, b2))
            }
            // Equal sizes with children on one side only cannot happen.
            (None, Some(_)) => Ordering::Less,
            (Some(_), None) => Ordering::Greater,
        }
    })
}

/// The isomorphism class of a plane tree.
pub fn canonicalize(t: &PlaneTree) -> CanonicalTree {
    match t.children() {
        None => CanonicalTree::leaf(),
        Some((l, r)) => CanonicalTree::node(canonicalize(l), canonicalize(r)),
    }
}

/// Canonicalize and report where each leaf went: the returned permutation
/// maps the DF position of a leaf in `t` to its DF position in the
/// canonical embedding.
pub fn canonicalize_with_leaf_perm(t: &PlaneTree) -> (CanonicalTree, Perm) {
    fn go(t: &PlaneTree) -> (CanonicalTree, Vec<u32>) {
        match t.children() {
            None => (CanonicalTree::leaf(), vec![0]),
            Some((l, r)) => {
                let (cl, pl) = go(l);
                let (cr, pr) = go(r);
                let (nl, nr) = (pl.len() as u32, pr.len() as u32);
                let tree = CanonicalTree::node(cl.clone(), cr.clone());
                let keep_order = canonical_cmp(&cl, &cr) != Ordering::Greater;
                let mut map = Vec::with_capacity((nl + nr) as usize);
                if keep_order {
                    map.extend(pl.iter().copied());
                    map.extend(pr.iter().map(|&p| p + nl));
                } else {
                    map.extend(pl.iter().map(|&p| p + nr));
                    map.extend(pr.iter().copied());
                }
                (tree, map)
            }
        }
    }
    let (tree, map) = go(t);
    (tree, Perm::from_images(map).expect("leaf map is a bijection"))
}

// ---------------------------------------------------------------------------
// Enumeration
// ---------------------------------------------------------------------------

/// Streaming enumeration of all plane trees with n leaves, deterministic
/// order, restartable. Refuses when C_n exceeds the cap.
pub fn enumerate_plane_trees(n: u64, caps: &Caps) -> Result<PlaneTreeIter> {
    if n == 0 {
        return Err(Error::Domain("trees have at least one leaf".into()));
    }
    let count = catalan(n);
    if count > BigUint::from(caps.plane_trees) {
        return Err(Error::resource(format!("C_{n}"), &count, caps.plane_trees));
    }
    Ok(PlaneTreeIter {
        next: Some(first_plane(n)),
    })
}

#[derive(Debug)]
pub struct PlaneTreeIter {
    next: Option<PlaneTree>,
}

impl Iterator for PlaneTreeIter {
    type Item = PlaneTree;

    fn next(&mut self) -> Option<PlaneTree> {
        let current = self.next.take()?;
        let mut succ = current.clone();
        self.next = advance_plane(&mut succ).then_some(succ);
        Some(current)
    }
}

fn first_plane(n: u64) -> PlaneTree {
    // Split 1 | n-1, recursively first: the right caterpillar (L,(L,(L,...))).
    let mut t = PlaneTree::Leaf;
    for _ in 1..n {
        t = PlaneTree::node(PlaneTree::Leaf, t);
    }
    t
}

// In-place successor in the order: left size ascending, then left subtree,
// then right subtree. Returns false after the last tree.
fn advance_plane(t: &mut PlaneTree) -> bool {
    let PlaneTree::Node(l, r) = t else { return false };
    if advance_plane(r) {
        return true;
    }
    let (nl, nr) = (l.leaves(), r.leaves());
    if advance_plane(l) {
        **r = first_plane(nr);
        return true;
    }
    if nl + 1 <= nl + nr - 1 {
        **l = first_plane(nl + 1);
        **r = first_plane(nr - 1);
        return true;
    }
    false
}

/// All isomorphism classes with n leaves, construction order (deterministic),
/// cached per n. Refuses when the class count exceeds the cap.
pub fn enumerate_canonical_trees(n: u64, caps: &Caps) -> Result<Arc<Vec<CanonicalTree>>> {
    static MEMO: Lazy<Mutex<HashMap<u64, Arc<Vec<CanonicalTree>>>>> =
        Lazy::new(|| Mutex::new(HashMap::new()));
    if n == 0 {
        return Err(Error::Domain("trees have at least one leaf".into()));
    }
    let count = wedderburn_etherington(n);
    if count > BigUint::from(caps.canonical_trees) {
        return Err(Error::resource(
            format!("class count at {n} leaves"),
            &count,
            caps.canonical_trees,
        ));
    }
    if let Some(v) = MEMO.lock().unwrap().get(&n) {
        return Ok(v.clone());
    }
    // Build every smaller size as well; trees share structure bottom-up.
    let mut levels: Vec<Arc<Vec<CanonicalTree>>> = vec![Arc::new(Vec::new())];
    levels.push(Arc::new(vec![CanonicalTree::leaf()]));
    for m in 2..=n {
        if let Some(v) = MEMO.lock().unwrap().get(&m) {
            levels.push(v.clone());
            continue;
        }
        let mut out = Vec::new();
        for i in 1..=m / 2 {
            let lo = levels[i as usize].clone();
            let hi = levels[(m - i) as usize].clone();
            if i < m - i {
                for a in lo.iter() {
                    for b in hi.iter() {
                        out.push(CanonicalTree::node(a.clone(), b.clone()));
                    }
                }
            } else {
                for (x, a) in lo.iter().enumerate() {
                    for b in lo.iter().skip(x) {
                        out.push(CanonicalTree::node(a.clone(), b.clone()));
                    }
                }
            }
        }
        let arc = Arc::new(out);
        MEMO.lock().unwrap().insert(m, arc.clone());
        levels.push(arc);
    }
    Ok(levels[n as usize].clone())
}

// ---------------------------------------------------------------------------
// Shape statistics
// ---------------------------------------------------------------------------

/// Per-tree shape summary. `occurrences` counts fringe subtrees by
/// isomorphism class (every node contributes its subtree).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ShapeStats {
    pub cherries: u32,
    pub height: u32,
    pub generators: u32,
    pub occurrences: BTreeMap<CanonicalTree, u64>,
}

pub fn shape_stats(t: &CanonicalTree) -> ShapeStats {
    let mut occurrences = BTreeMap::new();
    fn walk(t: &CanonicalTree, occ: &mut BTreeMap<CanonicalTree, u64>) {
        *occ.entry(t.clone()).or_insert(0) += 1;
        if let Some((a, b)) = t.children() {
            walk(a, occ);
            walk(b, occ);
        }
    }
    walk(t, &mut occurrences);
    ShapeStats {
        cherries: t.cherries(),
        height: t.height(),
        generators: t.generators(),
        occurrences,
    }
}
