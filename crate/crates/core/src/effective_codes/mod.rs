//! Borel codes on well-founded trees, Hausdorff codes over finite
//! well-orders, and the effective transformation of staged
//! `F_σ ∩ G_δ` presentations into Hausdorff codes.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::alt_trees::{TreeError, WfTree};
use crate::diff_hierarchy::{DiffCode, Polarity};
use crate::finite_space::PointSet;
use crate::ordinals::Ordinal;
use crate::space_models::SpaceModel;

pub mod presentation;
pub mod transform;

pub use presentation::{
    ClopenPresentation, FirstOnePresentation, RowListPresentation, StagedPresentation,
};
pub use transform::{AltTreeEngine, NodeTrace, TransformError, TransformReport, Verdict};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CodeError {
    #[error(transparent)]
    Tree(#[from] TreeError),
    #[error("children of node {0:?} are not in (2n, 2n+1) pairs")]
    Unpaired(Vec<u64>),
    #[error("order is not a permutation of 0..{0}")]
    NotPermutation(usize),
    #[error("expected {expected} trees, found {found}")]
    TreeCount { expected: usize, found: usize },
    #[error("parity set does not match the order")]
    ParitySet,
    #[error("code length {0} is not finite")]
    Infinite(Ordinal),
    #[error("entry {0} is not a union of basis elements")]
    NotOpen(usize),
    #[error("malformed code JSON: {0}")]
    Json(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Side {
    Sigma,
    Pi,
}

/// A Borel code: a finite well-founded tree read bottom-up. Leaves other than
/// the root name basis elements by their last letter; rank-1 nodes take the
/// union of their children; higher nodes take `⋃_n ⟦σ⌢2n⟧ ∖ ⟦σ⌢(2n+1)⟧`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "WfTree", into = "WfTree")]
pub struct BorelCode {
    tree: WfTree,
}

impl TryFrom<WfTree> for BorelCode {
    type Error = CodeError;
    fn try_from(tree: WfTree) -> Result<Self, CodeError> {
        BorelCode::new(tree)
    }
}

impl From<BorelCode> for WfTree {
    fn from(c: BorelCode) -> WfTree {
        c.tree
    }
}

impl BorelCode {
    pub fn new(tree: WfTree) -> Result<Self, CodeError> {
        let ranks = tree.rank_table();
        for (v, &r) in &ranks {
            if r < 2 {
                continue;
            }
            let labels: BTreeSet<u64> = tree
                .children(v)
                .iter()
                .map(|c| *c.last().unwrap())
                .collect();
            if labels.iter().any(|&l| !labels.contains(&(l ^ 1))) {
                return Err(CodeError::Unpaired(v.clone()));
            }
        }
        Ok(BorelCode { tree })
    }

    /// `{nil}`, denoting the empty set.
    pub fn empty() -> Self {
        BorelCode {
            tree: WfTree::root_only(),
        }
    }

    /// The rank-1 code of `⋃ O_i`.
    pub fn union_of(indices: &[u64]) -> Self {
        let nodes = std::iter::once(Vec::new()).chain(indices.iter().map(|&i| vec![i]));
        BorelCode {
            tree: WfTree::new(nodes).expect("prefix closed"),
        }
    }

    pub fn tree(&self) -> &WfTree {
        &self.tree
    }

    pub fn rank(&self) -> usize {
        self.tree.rank()
    }

    pub fn from_json(s: &str) -> Result<Self, CodeError> {
        serde_json::from_str(s).map_err(|e| CodeError::Json(e.to_string()))
    }

    /// Membership given `n ↦ (x ∈ O_n)`.
    pub fn eval<F: Fn(u64) -> bool>(&self, member: F, side: Side) -> bool {
        let ranks = self.tree.rank_table();
        let v = self.eval_node(&ranks, &[], &member);
        match side {
            Side::Sigma => v,
            Side::Pi => !v,
        }
    }

    fn eval_node<F: Fn(u64) -> bool>(
        &self,
        ranks: &BTreeMap<Vec<u64>, usize>,
        v: &[u64],
        member: &F,
    ) -> bool {
        match ranks[v] {
            0 => v.last().is_some_and(|&n| member(n)),
            1 => self
                .tree
                .children(v)
                .iter()
                .any(|c| member(*c.last().unwrap())),
            _ => {
                let kids: BTreeSet<u64> = self
                    .tree
                    .children(v)
                    .iter()
                    .map(|c| *c.last().unwrap())
                    .collect();
                kids.iter().filter(|&&l| l % 2 == 0).any(|&l| {
                    let mut a = v.to_vec();
                    a.push(l);
                    let mut b = v.to_vec();
                    b.push(l + 1);
                    self.eval_node(ranks, &a, member) && !self.eval_node(ranks, &b, member)
                })
            }
        }
    }

    /// Membership of `x` in a model; indices past the basis name `∅`.
    pub fn eval_in<M: SpaceModel>(&self, m: &M, x: &M::Point, side: Side) -> bool {
        self.eval(
            |n| {
                usize::try_from(n)
                    .ok()
                    .and_then(|n| m.basis(n))
                    .is_some_and(|o| m.contains(&o, x))
            },
            side,
        )
    }

    /// The Σ-denotation as a point set, computed bottom-up with set
    /// operations over the given basis.
    pub fn denote_sets(&self, basis: &[PointSet]) -> PointSet {
        let ranks = self.tree.rank_table();
        let mut memo: BTreeMap<Vec<u64>, PointSet> = BTreeMap::new();
        let mut by_len: Vec<&Vec<u64>> = self.tree.nodes().collect();
        by_len.sort_by_key(|v| std::cmp::Reverse(v.len()));
        let open = |n: u64| basis.get(n as usize).copied().unwrap_or(PointSet::EMPTY);
        for v in by_len {
            let kids = self.tree.children(v);
            let s = match ranks[v] {
                0 => v.last().map_or(PointSet::EMPTY, |&n| open(n)),
                1 => kids
                    .iter()
                    .fold(PointSet::EMPTY, |a, c| a.union(open(*c.last().unwrap()))),
                _ => {
                    let mut acc = PointSet::EMPTY;
                    for c in kids.iter().filter(|c| c.last().unwrap() % 2 == 0) {
                        let mut d = c.clone();
                        *d.last_mut().unwrap() += 1;
                        acc = acc.union(memo[c].difference(memo[&d]));
                    }
                    acc
                }
            };
            memo.insert(v.clone(), s);
        }
        memo[&Vec::new()]
    }
}

/// A Hausdorff code over a finite well-order `≼` on `0..α`: `order[k]` is
/// the element of order position `k`. A point belongs iff the `≼`-least `p`
/// with `x ∈ ⟦T_p⟧_Σ` lies in `parity_set`, the elements whose position has
/// parity opposite to `α`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawHausdorff")]
pub struct HausdorffCode {
    order: Vec<usize>,
    parity_set: Vec<usize>,
    trees: Vec<BorelCode>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawHausdorff {
    order: Vec<usize>,
    parity_set: Vec<usize>,
    trees: Vec<BorelCode>,
}

impl TryFrom<RawHausdorff> for HausdorffCode {
    type Error = CodeError;
    fn try_from(r: RawHausdorff) -> Result<Self, CodeError> {
        HausdorffCode::new(r.order, r.parity_set, r.trees)
    }
}

fn parity_set_of(order: &[usize]) -> Vec<usize> {
    let a = order.len();
    let mut p: Vec<usize> = order
        .iter()
        .enumerate()
        .filter(|(k, _)| (k + a) % 2 == 1)
        .map(|(_, &n)| n)
        .collect();
    p.sort_unstable();
    p
}

impl HausdorffCode {
    pub fn new(
        order: Vec<usize>,
        parity_set: Vec<usize>,
        trees: Vec<BorelCode>,
    ) -> Result<Self, CodeError> {
        let n = order.len();
        let mut seen = vec![false; n];
        for &e in &order {
            if e >= n || std::mem::replace(&mut seen[e], true) {
                return Err(CodeError::NotPermutation(n));
            }
        }
        if trees.len() != n {
            return Err(CodeError::TreeCount {
                expected: n,
                found: trees.len(),
            });
        }
        let mut ps = parity_set;
        ps.sort_unstable();
        if ps != parity_set_of(&order) {
            return Err(CodeError::ParitySet);
        }
        Ok(HausdorffCode {
            order,
            parity_set: ps,
            trees,
        })
    }

    /// Trees listed in order position; the order is the identity.
    pub fn from_ordered(trees: Vec<BorelCode>) -> Self {
        let order: Vec<usize> = (0..trees.len()).collect();
        let parity_set = parity_set_of(&order);
        HausdorffCode {
            order,
            parity_set,
            trees,
        }
    }

    /// Trees listed in order position, stored under the permutation `perm`
    /// (`perm[k]` is the element at position `k`).
    pub fn from_ordered_permuted(trees: Vec<BorelCode>, perm: &[usize]) -> Result<Self, CodeError> {
        if perm.len() != trees.len() {
            return Err(CodeError::TreeCount {
                expected: perm.len(),
                found: trees.len(),
            });
        }
        let mut slots: Vec<Option<BorelCode>> = vec![None; trees.len()];
        for (k, t) in trees.into_iter().enumerate() {
            let e = *perm.get(k).ok_or(CodeError::NotPermutation(perm.len()))?;
            if e >= slots.len() || slots[e].is_some() {
                return Err(CodeError::NotPermutation(perm.len()));
            }
            slots[e] = Some(t);
        }
        let trees = slots.into_iter().map(|t| t.expect("filled")).collect();
        HausdorffCode::new(perm.to_vec(), parity_set_of(perm), trees)
    }

    /// Sparse ordinal-indexed trees of a code of length `xi`, compressed to
    /// a finite order: an empty tree is inserted wherever the position
    /// parity would otherwise drift from the index parity.
    pub fn from_sparse(entries: &[(Ordinal, BorelCode)], xi: &Ordinal) -> Self {
        let mut trees = Vec::with_capacity(entries.len() + 1);
        for (idx, t) in entries {
            let want_odd = idx.parity() == crate::ordinals::Parity::Odd;
            if (trees.len() % 2 == 1) != want_odd {
                trees.push(BorelCode::empty());
            }
            trees.push(t.clone());
        }
        let xi_odd = xi.parity() == crate::ordinals::Parity::Odd;
        if (trees.len() % 2 == 1) != xi_odd {
            trees.push(BorelCode::empty());
        }
        HausdorffCode::from_ordered(trees)
    }

    /// Translation of a finite `D`-code of point sets over a basis of
    /// point sets: each entry becomes the rank-1 code of the basis elements
    /// inside it.
    pub fn from_diff(
        code: &DiffCode<PointSet>,
        basis: &[PointSet],
        perm: Option<&[usize]>,
    ) -> Result<Self, CodeError> {
        let alpha = code
            .alpha()
            .as_nat()
            .ok_or_else(|| CodeError::Infinite(code.alpha().clone()))? as usize;
        if code.polarity() != Polarity::D {
            return Err(CodeError::ParitySet);
        }
        let mut sets = vec![PointSet::EMPTY; alpha];
        for e in code.entries() {
            sets[e.index.as_nat().expect("below a finite alpha") as usize] = e.set;
        }
        let mut trees = Vec::with_capacity(alpha);
        for (k, s) in sets.iter().enumerate() {
            let inside: Vec<u64> = (0..basis.len())
                .filter(|&i| basis[i].is_subset(*s))
                .map(|i| i as u64)
                .collect();
            let cover = inside
                .iter()
                .fold(PointSet::EMPTY, |a, &i| a.union(basis[i as usize]));
            if cover != *s {
                return Err(CodeError::NotOpen(k));
            }
            trees.push(if s.is_empty() {
                BorelCode::empty()
            } else {
                BorelCode::union_of(&inside)
            });
        }
        match perm {
            Some(p) => HausdorffCode::from_ordered_permuted(trees, p),
            None => Ok(HausdorffCode::from_ordered(trees)),
        }
    }

    pub fn alpha(&self) -> usize {
        self.order.len()
    }

    pub fn order(&self) -> &[usize] {
        &self.order
    }

    pub fn parity_set(&self) -> &[usize] {
        &self.parity_set
    }

    pub fn trees(&self) -> &[BorelCode] {
        &self.trees
    }

    pub fn max_rank(&self) -> usize {
        self.trees.iter().map(BorelCode::rank).max().unwrap_or(0)
    }

    pub fn from_json(s: &str) -> Result<Self, CodeError> {
        serde_json::from_str(s).map_err(|e| CodeError::Json(e.to_string()))
    }

    /// The `≼`-least element whose tree contains the point.
    pub fn least_with<F: Fn(u64) -> bool>(&self, member: F) -> Option<usize> {
        self.order
            .iter()
            .copied()
            .find(|&p| self.trees[p].eval(&member, Side::Sigma))
    }

    pub fn eval<F: Fn(u64) -> bool>(&self, member: F) -> bool {
        self.least_with(member)
            .is_some_and(|p| self.parity_set.binary_search(&p).is_ok())
    }

    pub fn eval_in<M: SpaceModel>(&self, m: &M, x: &M::Point) -> bool {
        self.eval(|n| {
            usize::try_from(n)
                .ok()
                .and_then(|n| m.basis(n))
                .is_some_and(|o| m.contains(&o, x))
        })
    }
}
