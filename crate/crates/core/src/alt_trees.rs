//! Well-founded trees, alternating trees on finite posets and the
//! tree-based classification of Δ⁰₂ sets.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::diff_hierarchy::{level_bruteforce, DiffCode, DiffEntry, DiffError, Levels, Polarity};
use crate::finite_space::{FinitePoset, PointSet};
use crate::ordinals::Ordinal;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TreeError {
    #[error("tree is empty")]
    Empty,
    #[error("node {0:?} has no parent in the tree")]
    NotPrefixClosed(Vec<u64>),
    #[error("node {0:?} is unlabeled")]
    Unlabeled(Vec<u64>),
    #[error("label {0} is out of range")]
    BadLabel(usize),
    #[error("labels are not increasing at node {0:?}")]
    NotIncreasing(Vec<u64>),
    #[error("labels do not alternate at node {0:?}")]
    NotAlternating(Vec<u64>),
    #[error("root label has the wrong side")]
    WrongRoot,
    #[error("no subtree of rank {beta} with root side {eps}: tree rank is {rank}")]
    RankTooSmall { beta: usize, eps: bool, rank: usize },
    #[error(transparent)]
    Diff(#[from] DiffError),
}

/// A finite tree of natural-number sequences, closed under prefixes.
/// Serialized as `{"nodes": [[], [0], [0, 3]]}`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "RawTree")]
pub struct WfTree {
    nodes: BTreeSet<Vec<u64>>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawTree {
    nodes: Vec<Vec<u64>>,
}

impl TryFrom<RawTree> for WfTree {
    type Error = TreeError;
    fn try_from(r: RawTree) -> Result<Self, TreeError> {
        WfTree::new(r.nodes)
    }
}

impl WfTree {
    pub fn new<I: IntoIterator<Item = Vec<u64>>>(nodes: I) -> Result<Self, TreeError> {
        let nodes: BTreeSet<Vec<u64>> = nodes.into_iter().collect();
        if !nodes.contains(&Vec::new()) {
            return Err(TreeError::Empty);
        }
        for v in &nodes {
            if !v.is_empty() && !nodes.contains(&v[..v.len() - 1]) {
                return Err(TreeError::NotPrefixClosed(v.clone()));
            }
        }
        Ok(WfTree { nodes })
    }

    /// The one-node tree `{nil}`.
    pub fn root_only() -> Self {
        WfTree {
            nodes: [Vec::new()].into_iter().collect(),
        }
    }

    pub fn nodes(&self) -> impl Iterator<Item = &Vec<u64>> {
        self.nodes.iter()
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn contains(&self, v: &[u64]) -> bool {
        self.nodes.contains(v)
    }

    /// Children of `v` in increasing order of the last letter.
    pub fn children(&self, v: &[u64]) -> Vec<Vec<u64>> {
        let mut lo = v.to_vec();
        lo.push(0);
        self.nodes
            .range(lo..)
            .take_while(|w| w.len() > v.len() && w.starts_with(v))
            .filter(|w| w.len() == v.len() + 1)
            .cloned()
            .collect()
    }

    /// Rank of every node: leaves 0, otherwise one more than the largest
    /// child rank.
    pub fn rank_table(&self) -> BTreeMap<Vec<u64>, usize> {
        let mut by_len: Vec<&Vec<u64>> = self.nodes.iter().collect();
        by_len.sort_by_key(|v| std::cmp::Reverse(v.len()));
        let mut rank: BTreeMap<Vec<u64>, usize> = BTreeMap::new();
        for v in by_len {
            let r = rank.get(v).copied().unwrap_or(0);
            rank.insert(v.clone(), r);
            if !v.is_empty() {
                let parent = v[..v.len() - 1].to_vec();
                let e = rank.entry(parent).or_insert(0);
                *e = (*e).max(r + 1);
            }
        }
        rank
    }

    pub fn rank(&self) -> usize {
        self.rank_table()[&Vec::new()]
    }

    /// Subtree rooted at `v`, re-rooted to nil.
    pub fn subtree(&self, v: &[u64]) -> WfTree {
        WfTree {
            nodes: self
                .nodes
                .iter()
                .filter(|w| w.starts_with(v))
                .map(|w| w[v.len()..].to_vec())
                .collect(),
        }
    }

    /// Post-order (Kleene–Brouwer order restricted to the tree): children in
    /// increasing order before their parent.
    pub fn kb_order(&self) -> Vec<Vec<u64>> {
        let mut out = Vec::with_capacity(self.nodes.len());
        self.kb_rec(&[], &mut out);
        out
    }

    fn kb_rec(&self, v: &[u64], out: &mut Vec<Vec<u64>>) {
        for c in self.children(v) {
            self.kb_rec(&c, out);
        }
        out.push(v.to_vec());
    }

    pub fn from_json(s: &str) -> Result<Self, String> {
        serde_json::from_str(s).map_err(|e| e.to_string())
    }
}

/// An alternating tree for `(target, root_side)`: labels increase strictly
/// along branches, membership in `target` alternates, and the root lies in
/// `target` iff `root_side`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LabeledAltTree {
    pub tree: WfTree,
    pub labels: BTreeMap<Vec<u64>, usize>,
    pub target: PointSet,
    pub root_side: bool,
}

impl LabeledAltTree {
    pub fn validate(&self, p: &FinitePoset) -> Result<(), TreeError> {
        for v in self.tree.nodes() {
            let &l = self
                .labels
                .get(v)
                .ok_or_else(|| TreeError::Unlabeled(v.clone()))?;
            if l >= p.len() {
                return Err(TreeError::BadLabel(l));
            }
            if v.is_empty() {
                if self.target.contains(l) != self.root_side {
                    return Err(TreeError::WrongRoot);
                }
                continue;
            }
            let pl = self.labels[&v[..v.len() - 1]];
            if !p.lt(pl, l) {
                return Err(TreeError::NotIncreasing(v.clone()));
            }
            if self.target.contains(pl) == self.target.contains(l) {
                return Err(TreeError::NotAlternating(v.clone()));
            }
        }
        Ok(())
    }

    pub fn root_label(&self) -> usize {
        self.labels[&Vec::new()]
    }
}

/// Cuts an alternating tree of rank ≥ β (+1 when the root side differs from
/// `eps`) down to a path of rank exactly β whose root lies on side `eps`.
/// Returns the new tree and, for each of its nodes, the node it came from.
pub fn prune_to_rank(
    t: &LabeledAltTree,
    beta: usize,
    eps: bool,
) -> Result<(LabeledAltTree, BTreeMap<Vec<u64>, Vec<u64>>), TreeError> {
    let ranks = t.tree.rank_table();
    let rank = ranks[&Vec::new()];
    let skip = usize::from(t.root_side != eps);
    if rank < beta + skip {
        return Err(TreeError::RankTooSmall { beta, eps, rank });
    }
    // follow a deepest branch and keep the segment starting at depth `skip`
    let mut branch = vec![Vec::new()];
    let mut v: Vec<u64> = Vec::new();
    while ranks[&v] > 0 {
        let r = ranks[&v];
        v = t
            .tree
            .children(&v)
            .into_iter()
            .find(|c| ranks[c] + 1 == r)
            .expect("some child realizes the rank");
        branch.push(v.clone());
    }
    let seg = &branch[skip..skip + beta + 1];
    let mut nodes = Vec::new();
    let mut labels = BTreeMap::new();
    let mut embed = BTreeMap::new();
    for (d, orig) in seg.iter().enumerate() {
        let w = vec![0u64; d];
        labels.insert(w.clone(), t.labels[orig]);
        embed.insert(w.clone(), orig.clone());
        nodes.push(w);
    }
    let out = LabeledAltTree {
        tree: WfTree::new(nodes)?,
        labels,
        target: t.target,
        root_side: eps,
    };
    Ok((out, embed))
}

/// Longest alternating strictly increasing chain starting at each point,
/// counted in steps.
pub fn alt_chain_lengths(p: &FinitePoset, a: PointSet) -> Vec<usize> {
    let mut r = vec![0usize; p.len()];
    for &c in p.linear_extension().iter().rev() {
        r[c] = p
            .up(c)
            .iter()
            .filter(|&d| d != c && a.contains(d) != a.contains(c))
            .map(|d| r[d] + 1)
            .max()
            .unwrap_or(0);
    }
    r
}

/// Largest rank of an alternating tree for `(a, eps)`, or `None` when no
/// point lies on side `eps`.
pub fn max_alt_rank(p: &FinitePoset, a: PointSet, eps: bool) -> Option<usize> {
    let r = alt_chain_lengths(p, a);
    (0..p.len())
        .filter(|&c| a.contains(c) == eps)
        .map(|c| r[c])
        .max()
}

/// A longest alternating chain with first point on side `eps`.
pub fn alt_chain_witness(p: &FinitePoset, a: PointSet, eps: bool) -> Option<Vec<usize>> {
    let r = alt_chain_lengths(p, a);
    let mut c = (0..p.len())
        .filter(|&c| a.contains(c) == eps)
        .max_by_key(|&c| (r[c], std::cmp::Reverse(c)))?;
    let mut out = vec![c];
    while r[c] > 0 {
        c = p
            .up(c)
            .iter()
            .find(|&d| d != c && a.contains(d) != a.contains(c) && r[d] + 1 == r[c])
            .expect("chain continues");
        out.push(c);
    }
    Some(out)
}

/// The full alternating tree of all alternating chains starting at `b`,
/// children numbered by the label of the next point.
pub fn alternating_tree(p: &FinitePoset, a: PointSet, b: usize) -> LabeledAltTree {
    let mut nodes = vec![Vec::new()];
    let mut labels = BTreeMap::new();
    labels.insert(Vec::new(), b);
    let mut stack = vec![(Vec::<u64>::new(), b)];
    while let Some((v, c)) = stack.pop() {
        for d in p.up(c).iter() {
            if d != c && a.contains(d) != a.contains(c) {
                let mut w = v.clone();
                w.push(d as u64);
                labels.insert(w.clone(), d);
                nodes.push(w.clone());
                stack.push((w, d));
            }
        }
    }
    LabeledAltTree {
        tree: WfTree::new(nodes).expect("built prefix-closed"),
        labels,
        target: a,
        root_side: a.contains(b),
    }
}

/// Levels from alternating trees: `σ = 1 + max rank on side 1`, `π` likewise
/// on side 0, and 0 when the side is empty.
pub fn alt_levels(p: &FinitePoset, a: PointSet) -> Levels {
    Levels {
        sigma: max_alt_rank(p, a, true).map_or(0, |r| r + 1),
        pi: max_alt_rank(p, a, false).map_or(0, |r| r + 1),
    }
}

/// Hausdorff code of level `σ(a)` built from tree ranks:
/// `A_β = ⋃ {↑c : rank(c) ≤ β, (c ∈ a) ⟺ β ≁ σ}`.
pub fn diff_code_from_trees(p: &FinitePoset, a: PointSet) -> DiffCode<PointSet> {
    let alpha = alt_levels(p, a).sigma;
    let rank: Vec<usize> = (0..p.len())
        .map(|b| alternating_tree(p, a, b).tree.rank())
        .collect();
    let mut entries = Vec::new();
    for beta in 0..alpha {
        let inside = beta % 2 != alpha % 2;
        let set = (0..p.len())
            .filter(|&c| rank[c] <= beta && a.contains(c) == inside)
            .fold(PointSet::EMPTY, |acc, c| acc.union(p.up(c)));
        if !set.is_empty() {
            entries.push(DiffEntry {
                index: Ordinal::from_nat(beta as u64),
                set,
            });
        }
    }
    DiffCode::new(Ordinal::from_nat(alpha as u64), entries, Polarity::D)
        .expect("indices below alpha")
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum AuditStatement {
    /// With a least element: `σ ≤ n ∧ π ≤ n ⟺ min(σ, π) < n`.
    LeastElement,
    /// For `n ≥ 1`: `σ ≤ n+1 ∧ π ≤ n+1 ⟺ min(σ, π) ≤ n`.
    Successor,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AuditCheck {
    pub statement: AuditStatement,
    pub n: usize,
    pub violations: Vec<PointSet>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AuditReport {
    pub has_least: bool,
    pub checks: Vec<AuditCheck>,
}

impl AuditReport {
    pub fn violations(&self) -> usize {
        self.checks.iter().map(|c| c.violations.len()).sum()
    }
}

/// Checks the ambiguous-class identities for every subset, using the
/// brute-force levels. The least-element identity is only checked when the
/// poset has a least element.
pub fn ambiguity_audit(p: &FinitePoset, n_max: usize) -> Result<AuditReport, DiffError> {
    let levels: Vec<(PointSet, Levels)> = (0..(1u64 << p.len()))
        .map(|bits| {
            level_bruteforce(
                p,
                PointSet(bits),
                crate::diff_hierarchy::DEFAULT_STATE_BUDGET,
            )
            .map(|r| (PointSet(bits), r.0))
        })
        .collect::<Result<_, _>>()?;
    let has_least = p.least_element().is_some();
    let mut checks = Vec::new();
    for n in 0..=n_max {
        if has_least {
            let violations = levels
                .iter()
                .filter(|(_, l)| (l.sigma <= n && l.pi <= n) != (l.sigma.min(l.pi) < n))
                .map(|(a, _)| *a)
                .collect();
            checks.push(AuditCheck {
                statement: AuditStatement::LeastElement,
                n,
                violations,
            });
        }
        if n >= 1 {
            let violations = levels
                .iter()
                .filter(|(_, l)| (l.sigma <= n + 1 && l.pi <= n + 1) != (l.sigma.min(l.pi) <= n))
                .map(|(a, _)| *a)
                .collect();
            checks.push(AuditCheck {
                statement: AuditStatement::Successor,
                n,
                violations,
            });
        }
    }
    Ok(AuditReport { has_least, checks })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SurgeryReport {
    pub extended: crate::finite_space::PosetJson,
    pub extended_set: PointSet,
    /// Levels of the original set in the original poset.
    pub before: Levels,
    /// Levels of the extended set in the extended poset.
    pub after: Levels,
    /// Both sets stay ambiguous at `n + 1` and drop to level `≤ n`.
    pub holds: bool,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SurgeryError {
    #[error("set is not in D_(n+1) ∩ co-D_(n+1) for n = {0}")]
    NotAmbiguous(usize),
    #[error("surgery needs n ≥ 1")]
    LevelZero,
    #[error(transparent)]
    Diff(#[from] DiffError),
    #[error(transparent)]
    Poset(#[from] crate::finite_space::PosetError),
}

/// Surgery for `a ∈ D_(n+1) ∩ co-D_(n+1)`, `n ≥ 1`: adjoin a point below the
/// union of a level-(n+1) code for `a` and put it into `a`. The extended set
/// is again ambiguous at `n + 1` and has level at most `n`.
pub fn surgery_check(
    p: &FinitePoset,
    a: PointSet,
    n: usize,
) -> Result<SurgeryReport, SurgeryError> {
    if n == 0 {
        return Err(SurgeryError::LevelZero);
    }
    let budget = crate::diff_hierarchy::DEFAULT_STATE_BUDGET;
    let (before, code, _) = level_bruteforce(p, a, budget)?;
    if before.sigma > n + 1 || before.pi > n + 1 {
        return Err(SurgeryError::NotAmbiguous(n));
    }
    let top = code
        .entries()
        .iter()
        .fold(PointSet::EMPTY, |acc, e| acc.union(e.set));
    let q = p.adjoin_point_below(top)?;
    let mut b = a;
    b.insert(p.len());
    let (after, _, _) = level_bruteforce(&q, b, budget)?;
    let holds = after.sigma <= n + 1
        && after.pi <= n + 1
        && after.sigma.min(after.pi) <= n
        && before.sigma.min(before.pi) <= n;
    Ok(SurgeryReport {
        extended: q.to_json_value(),
        extended_set: b,
        before,
        after,
        holds,
    })
}
