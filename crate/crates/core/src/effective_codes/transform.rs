//! The alternating tree of a staged presentation and the Hausdorff code it
//! induces.
//!
//! Nodes are pairs `(m, t)` of a basis index and a stage, both below the
//! budget `B`. A pair has type `ε` when `F_ε(m, t) > F_{1-ε}(m, t)`, where
//! `F_ε(m, t)` counts the leading rows `q < t` whose stage-`t` union
//! approximates `O_m`. A child `(p, u)` of `(m, t)` has `p > m`, `u > t`,
//! `O_m ≪ O_p` at stage `u` and the opposite type. Siblings are ordered by the
//! Cantor code of the pair.
//!
//! The tree is never built explicitly: subtree sizes are computed by suffix
//! sums over stages, which gives the Kleene–Brouwer position of any node and
//! hence its entry `ω·(i+1) + ε` in a code of length `(ω+2)·|T|`.

use std::collections::{BTreeMap, HashMap};
use std::hash::Hash;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::presentation::{stage_guess, StagedPresentation};
use super::{BorelCode, HausdorffCode};
use crate::alt_trees::WfTree;
use crate::diff_hierarchy::{DiffCode, DiffEntry, Polarity};
use crate::ordinals::Ordinal;
use crate::space_models::{SpaceModel, UnionClosed};

#[derive(Debug, Error, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum TransformError {
    #[error("invalid presentation: {0}")]
    Invalid(String),
    #[error("row {row} of side {eps} shrinks at stage {stage}")]
    NotMonotone {
        eps: usize,
        row: usize,
        stage: usize,
    },
    #[error("test point {point} lies on both or neither side at stage {stage}")]
    Ambiguous { point: usize, stage: usize },
    #[error("test point {point} is presented on the wrong side")]
    WrongSide { point: usize },
    #[error("tree size overflows")]
    Overflow,
    #[error("budget must be at least 2")]
    BudgetTooSmall,
}

const NEVER: u32 = u32::MAX;
const UNTYPED: u8 = 2;

pub fn cantor(p: usize, u: usize) -> u64 {
    let s = (p + u) as u64;
    s * (s + 1) / 2 + u as u64
}

/// Path of the Kleene–Brouwer-least node whose open holds a point.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NodeTrace {
    pub path: Vec<(usize, usize)>,
    /// Kleene–Brouwer position, the root being last.
    pub position: u128,
    /// Type of the last node; `None` at the root.
    pub eps: Option<usize>,
}

impl NodeTrace {
    pub fn value(&self) -> bool {
        self.eps == Some(1)
    }
}

pub struct AltTreeEngine<'a, M: SpaceModel> {
    model: &'a M,
    budget: usize,
    n_opens: usize,
    opens: Vec<M::Open>,
    f: Vec<[u32; 2]>,
    ty: Vec<u8>,
    u0: Vec<u32>,
    size: Vec<u128>,
    suf: Vec<u128>,
    next: Vec<u32>,
    total: u128,
}

impl<'a, M> AltTreeEngine<'a, M>
where
    M: SpaceModel + UnionClosed,
    M::Open: Hash + Eq,
{
    pub fn new<P: StagedPresentation<M> + ?Sized>(
        model: &'a M,
        pres: &P,
        budget: usize,
    ) -> Result<Self, TransformError> {
        if budget < 2 {
            return Err(TransformError::BudgetTooSmall);
        }
        let b = budget;
        let n_opens = model.basis_len().map_or(b, |l| l.min(b));
        let opens: Vec<M::Open> = (0..n_opens)
            .map(|i| model.basis(i).expect("index below basis length"))
            .collect();

        // λ of every row q < t at every stage t < B, shared by content
        let mut ids: HashMap<Vec<M::Open>, usize> = HashMap::new();
        let mut joined: Vec<Option<M::Open>> = Vec::new();
        let mut lam: [Vec<usize>; 2] = [vec![0; b * b], vec![0; b * b]];
        for (eps, table) in lam.iter_mut().enumerate() {
            for t in 0..b {
                for q in 0..t {
                    let row = pres.row(model, eps, q, t);
                    let id = match ids.get(&row) {
                        Some(&id) => id,
                        None => {
                            joined.push(model.union(&row));
                            ids.insert(row, joined.len() - 1);
                            joined.len() - 1
                        }
                    };
                    table[t * b + q] = id;
                }
            }
        }

        let mut f = vec![[0u32; 2]; n_opens * b];
        let mut ty = vec![UNTYPED; n_opens * b];
        for m in 0..n_opens {
            for t in 0..b {
                let mut v = [0u32; 2];
                for (eps, table) in lam.iter().enumerate() {
                    v[eps] = (0..t)
                        .take_while(|&q| {
                            joined[table[t * b + q]]
                                .as_ref()
                                .is_some_and(|l| model.approx_at(t, l, &opens[m]))
                        })
                        .count() as u32;
                }
                f[m * b + t] = v;
                if v[0] != v[1] {
                    ty[m * b + t] = u8::from(v[1] > v[0]);
                }
            }
        }

        // least stage at which O_m ≪ O_p, by bisection on the monotone R^(t)
        let mut u0 = vec![NEVER; n_opens * n_opens];
        for m in 0..n_opens {
            for p in m + 1..n_opens {
                if !model.approx_at(b - 1, &opens[m], &opens[p]) {
                    continue;
                }
                let (mut lo, mut hi) = (0, b - 1);
                while lo < hi {
                    let mid = (lo + hi) / 2;
                    if model.approx_at(mid, &opens[m], &opens[p]) {
                        hi = mid;
                    } else {
                        lo = mid + 1;
                    }
                }
                u0[m * n_opens + p] = lo as u32;
            }
        }

        let stride = b + 1;
        let mut eng = AltTreeEngine {
            model,
            budget,
            n_opens,
            opens,
            f,
            ty,
            u0,
            size: vec![0; n_opens * b],
            suf: vec![0; n_opens * 2 * stride],
            next: vec![NEVER; n_opens * 2 * stride],
            total: 1,
        };
        for m in (0..n_opens).rev() {
            for t in 0..b {
                let tau = eng.ty[m * b + t];
                if tau == UNTYPED {
                    continue;
                }
                let mut s: u128 = 1;
                for p in m + 1..n_opens {
                    if let Some(lo) = eng.child_floor(m, t, p) {
                        s = s
                            .checked_add(eng.suf_at(p, 1 - tau as usize, lo))
                            .ok_or(TransformError::Overflow)?;
                    }
                }
                eng.size[m * b + t] = s;
            }
            for tau in 0..2 {
                let base = (m * 2 + tau) * stride;
                eng.next[base + b] = b as u32;
                for u in (0..b).rev() {
                    let here = eng.ty[m * b + u] == tau as u8;
                    let add = if here { eng.size[m * b + u] } else { 0 };
                    eng.suf[base + u] = eng.suf[base + u + 1]
                        .checked_add(add)
                        .ok_or(TransformError::Overflow)?;
                    eng.next[base + u] = if here {
                        u as u32
                    } else {
                        eng.next[base + u + 1]
                    };
                }
            }
        }
        for m in 0..n_opens {
            for tau in 0..2 {
                eng.total = eng
                    .total
                    .checked_add(eng.suf_at(m, tau, 0))
                    .ok_or(TransformError::Overflow)?;
            }
        }
        Ok(eng)
    }

    pub fn budget(&self) -> usize {
        self.budget
    }

    /// `|T|`, the root included.
    pub fn tree_size(&self) -> u128 {
        self.total
    }

    /// `ξ = (ω+2)·|T| = ω·|T| + 2`.
    pub fn xi(&self) -> Result<Ordinal, TransformError> {
        let n = u64::try_from(self.total).map_err(|_| TransformError::Overflow)?;
        Ordinal::omega()
            .add(&Ordinal::from_nat(2))
            .checked_mul_nat(n)
            .map_err(|_| TransformError::Overflow)
    }

    pub fn f(&self, m: usize, t: usize) -> [u32; 2] {
        self.f[m * self.budget + t]
    }

    pub fn node_type(&self, m: usize, t: usize) -> Option<usize> {
        match self.ty.get(m * self.budget + t) {
            Some(&e) if e != UNTYPED && m < self.n_opens => Some(e as usize),
            _ => None,
        }
    }

    pub fn subtree_size(&self, m: usize, t: usize) -> u128 {
        self.size[m * self.budget + t]
    }

    fn suf_at(&self, p: usize, tau: usize, u: usize) -> u128 {
        self.suf[(p * 2 + tau) * (self.budget + 1) + u.min(self.budget)]
    }

    fn next_at(&self, p: usize, tau: usize, u: usize) -> usize {
        self.next[(p * 2 + tau) * (self.budget + 1) + u.min(self.budget)] as usize
    }

    /// Least stage a child `(p, ·)` of `(m, t)` may carry, if any.
    fn child_floor(&self, m: usize, t: usize, p: usize) -> Option<usize> {
        match self.u0[m * self.n_opens + p] {
            NEVER => None,
            a => Some((t + 1).max(a as usize)),
        }
    }

    /// For the root (`None`) or a node: each admissible `p` with its least
    /// stage and the types allowed there.
    fn slots(&self, node: Option<(usize, usize)>) -> Vec<(usize, usize, &'static [usize])> {
        match node {
            None => (0..self.n_opens)
                .map(|p| (p, 0, &[0usize, 1][..]))
                .collect(),
            Some((m, t)) => {
                let want: &'static [usize] = if self.node_type(m, t) == Some(1) {
                    &[0]
                } else {
                    &[1]
                };
                (m + 1..self.n_opens)
                    .filter_map(|p| self.child_floor(m, t, p).map(|lo| (p, lo, want)))
                    .collect()
            }
        }
    }

    /// Children in Cantor-code order.
    pub fn children(&self, node: Option<(usize, usize)>) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for (p, lo, want) in self.slots(node) {
            for u in lo..self.budget {
                if self.node_type(p, u).is_some_and(|e| want.contains(&e)) {
                    out.push((p, u));
                }
            }
        }
        out.sort_by_key(|&(p, u)| cantor(p, u));
        out
    }

    /// The Kleene–Brouwer-least node whose open holds `x`. Opens shrink
    /// along branches, so the nodes holding `x` form a subtree and its
    /// least node is reached by always entering the least child holding `x`.
    pub fn locate(&self, x: &M::Point) -> NodeTrace {
        let mut node: Option<(usize, usize)> = None;
        let mut path = Vec::new();
        let mut offset: u128 = 0;
        loop {
            let slots = self.slots(node);
            let mut best: Option<(u64, usize, usize)> = None;
            for &(p, lo, want) in &slots {
                if !self.model.contains(&self.opens[p], x) {
                    continue;
                }
                let u = want
                    .iter()
                    .map(|&e| self.next_at(p, e, lo))
                    .min()
                    .unwrap_or(self.budget);
                if u < self.budget {
                    let c = cantor(p, u);
                    if best.is_none_or(|b| c < b.0) {
                        best = Some((c, p, u));
                    }
                }
            }
            let Some((code, p, u)) = best else { break };
            for &(q, lo, want) in &slots {
                // stages of q whose code is below `code`
                let (mut a, mut z) = (lo, self.budget);
                while a < z {
                    let mid = (a + z) / 2;
                    if cantor(q, mid) < code {
                        a = mid + 1;
                    } else {
                        z = mid;
                    }
                }
                for &e in want {
                    offset += self.suf_at(q, e, lo) - self.suf_at(q, e, a);
                }
            }
            path.push((p, u));
            node = Some((p, u));
        }
        match node {
            None => NodeTrace {
                path,
                position: self.total - 1,
                eps: None,
            },
            Some((m, t)) => NodeTrace {
                path,
                position: offset + self.subtree_size(m, t) - 1,
                eps: self.node_type(m, t),
            },
        }
    }

    pub fn eval(&self, x: &M::Point) -> bool {
        self.locate(x).value()
    }

    /// Nodes on `path` where some `F_ε` falls below half the depth.
    pub fn growth_violations(&self, path: &[(usize, usize)]) -> Vec<usize> {
        path.iter()
            .enumerate()
            .filter(|&(l, &(m, t))| self.f(m, t).iter().any(|&v| (v as usize) < l / 2))
            .map(|(l, _)| l)
            .collect()
    }

    /// For typed pairs `(m, t)` with `m, t < region` holding `x` and of type
    /// `ε` opposite to the truth side, checks for a child holding `x`.
    /// Returns (pairs checked, pairs without such a child).
    pub fn extension_check(&self, x: &M::Point, truth: bool, region: usize) -> (usize, usize) {
        let stuck = usize::from(!truth);
        let (mut checked, mut missing) = (0, 0);
        for m in 0..region.min(self.n_opens) {
            if !self.model.contains(&self.opens[m], x) {
                continue;
            }
            for t in 0..region.min(self.budget) {
                if self.node_type(m, t) != Some(stuck) {
                    continue;
                }
                checked += 1;
                let found = self.slots(Some((m, t))).into_iter().any(|(p, lo, want)| {
                    self.model.contains(&self.opens[p], x)
                        && want.iter().any(|&e| self.next_at(p, e, lo) < self.budget)
                });
                if !found {
                    missing += 1;
                }
            }
        }
        (checked, missing)
    }

    /// The explicit tree, when it has at most `limit` nodes.
    pub fn materialize(
        &self,
        limit: usize,
    ) -> Result<Option<Materialized<M::Open>>, TransformError> {
        if self.total > limit as u128 {
            return Ok(None);
        }
        let mut nodes: BTreeMap<Vec<u64>, (usize, usize)> = BTreeMap::new();
        let mut stack: Vec<(Vec<u64>, Option<(usize, usize)>)> = vec![(Vec::new(), None)];
        while let Some((v, node)) = stack.pop() {
            for (p, u) in self.children(node) {
                let mut w = v.clone();
                w.push(cantor(p, u));
                nodes.insert(w.clone(), (p, u));
                stack.push((w, Some((p, u))));
            }
        }
        let tree = WfTree::new(std::iter::once(Vec::new()).chain(nodes.keys().cloned()))
            .expect("prefix closed");
        let xi = self.xi()?;
        let mut entries = Vec::new();
        let mut sparse = Vec::new();
        let mut positions = Vec::new();
        for (i, v) in tree.kb_order().into_iter().enumerate() {
            let Some(&(m, t)) = nodes.get(&v) else {
                continue;
            };
            let eps = self.node_type(m, t).expect("tree nodes are typed");
            let index = entry_index(i as u64, eps)?;
            entries.push(DiffEntry {
                index: index.clone(),
                set: self.opens[m].clone(),
            });
            sparse.push((index, BorelCode::union_of(&[m as u64])));
            positions.push((v, i));
        }
        let code =
            DiffCode::new(xi.clone(), entries, Polarity::D).expect("indices increase below xi");
        let hausdorff = HausdorffCode::from_sparse(&sparse, &xi);
        Ok(Some(Materialized {
            tree,
            nodes,
            positions,
            code,
            hausdorff,
            xi,
        }))
    }
}

/// `(ω+2)·i + ω + ε = ω·(i+1) + ε`, the entry of node `i` in the code.
pub fn entry_index(i: u64, eps: usize) -> Result<Ordinal, TransformError> {
    let k = i.checked_add(1).ok_or(TransformError::Overflow)?;
    Ok(Ordinal::omega()
        .mul_nat(k)
        .add(&Ordinal::from_nat(eps as u64)))
}

/// Rank of `(σ, γ)` in `T × (ω+2)` ordered lexicographically, `σ` at
/// position `i`.
pub fn rank_in_product(i: u64, gamma: &Ordinal) -> Result<Ordinal, TransformError> {
    Ordinal::omega()
        .add(&Ordinal::from_nat(2))
        .checked_mul_nat(i)
        .and_then(|o| o.checked_add(gamma))
        .map_err(|_| TransformError::Overflow)
}

/// Checks that the rank of `(σ_i, γ)` has the parity of `γ` for sampled
/// `γ < ω+2`, and that the code entry of `σ_i` is its rank at `ω+ε`.
pub struct ParityCheck {
    step: Ordinal,
    gammas: Vec<Ordinal>,
}

impl Default for ParityCheck {
    fn default() -> Self {
        let w = Ordinal::omega();
        let gammas = vec![
            Ordinal::zero(),
            Ordinal::from_nat(1),
            Ordinal::from_nat(2),
            w.clone(),
            w.succ(),
        ];
        ParityCheck {
            step: w.add(&Ordinal::from_nat(2)),
            gammas,
        }
    }
}

impl ParityCheck {
    pub fn holds(&self, i: u64) -> Result<bool, TransformError> {
        let base = self
            .step
            .checked_mul_nat(i)
            .map_err(|_| TransformError::Overflow)?;
        let k = i.checked_add(1).ok_or(TransformError::Overflow)?;
        for g in &self.gammas {
            let r = base.checked_add(g).map_err(|_| TransformError::Overflow)?;
            if r.parity() != g.parity() {
                return Ok(false);
            }
            if g.is_limit() && r.terms() != [(1, k)]
                || g.as_nat().is_none() && !g.is_limit() && r.terms() != [(1, k), (0, 1)]
            {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

pub fn parity_of_rank_holds(i: u64) -> Result<bool, TransformError> {
    ParityCheck::default().holds(i)
}

pub struct Materialized<O> {
    pub tree: WfTree,
    /// Node label sequence to its last pair.
    pub nodes: BTreeMap<Vec<u64>, (usize, usize)>,
    /// Non-root nodes with their Kleene–Brouwer positions.
    pub positions: Vec<(Vec<u64>, usize)>,
    pub code: DiffCode<O>,
    pub hausdorff: HausdorffCode,
    pub xi: Ordinal,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Verdict {
    Agree,
    /// Some answers were not yet stable; `changed_at` is the last budget at
    /// which any answer moved.
    Incomplete {
        budget: usize,
        unstable: Vec<usize>,
        changed_at: usize,
    },
    /// Stable answers that contradict the truth.
    Mismatch {
        budget: usize,
        points: Vec<usize>,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PointRow {
    pub point: String,
    pub truth: Option<bool>,
    pub value: bool,
    pub stable: bool,
    pub position: String,
    pub depth: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TransformReport {
    pub presentation: String,
    pub budgets: Vec<usize>,
    pub budget: usize,
    pub tree_size: String,
    pub xi: String,
    pub verdict: Verdict,
    pub parity_checked: u64,
    pub parity_ok: bool,
    pub growth_violations: usize,
    pub rows: Vec<PointRow>,
}

/// Runs the transform with doubling budgets from `start` up to `max`, until
/// every test point has a stable answer across `[B/2, B]` matching the
/// truth (from the presentation, or its stage guess at `B`).
pub fn run_transform<M, P>(
    model: &M,
    pres: &P,
    points: &[M::Point],
    start: usize,
    max: usize,
) -> Result<TransformReport, TransformError>
where
    M: SpaceModel + UnionClosed,
    M::Open: Hash + Eq,
    P: StagedPresentation<M> + ?Sized,
{
    let mut b = start.max(2);
    let mut prev: Option<(Vec<bool>, Vec<Option<bool>>)> = None;
    let mut budgets = Vec::new();
    let mut changed_at = b;
    loop {
        budgets.push(b);
        let eng = AltTreeEngine::new(model, pres, b)?;
        let traces: Vec<NodeTrace> = points.iter().map(|x| eng.locate(x)).collect();
        let values: Vec<bool> = traces.iter().map(NodeTrace::value).collect();
        let guesses: Vec<Option<bool>> = points
            .iter()
            .map(|x| stage_guess(model, pres, x, b))
            .collect();
        // the oracle when there is one, otherwise a stage guess stable over [B/2, B]
        let truth: Vec<Option<bool>> = (0..points.len())
            .map(|i| {
                pres.truth(model, &points[i]).or_else(|| {
                    let before = prev.as_ref().and_then(|p| p.1[i]);
                    guesses[i].filter(|&g| before == Some(g))
                })
            })
            .collect();
        let stable: Vec<bool> = match &prev {
            Some((p, _)) => p.iter().zip(&values).map(|(a, c)| a == c).collect(),
            None => vec![false; points.len()],
        };
        if prev.as_ref().is_some_and(|p| p.0 != values) {
            changed_at = b;
        }
        let open: Vec<usize> = (0..points.len())
            .filter(|&i| truth[i].is_none() || (!stable[i] && truth[i] != Some(values[i])))
            .collect();
        let wrong: Vec<usize> = (0..points.len())
            .filter(|&i| stable[i] && truth[i].is_some_and(|v| v != values[i]))
            .collect();
        let done = open.is_empty() && wrong.is_empty();
        if done || b.saturating_mul(2) > max {
            let verdict = if done {
                Verdict::Agree
            } else if !wrong.is_empty() {
                Verdict::Mismatch {
                    budget: b,
                    points: wrong,
                }
            } else {
                Verdict::Incomplete {
                    budget: b,
                    unstable: open,
                    changed_at,
                }
            };
            // parity bookkeeping for every node position of the tree
            let total = u64::try_from(eng.tree_size()).map_err(|_| TransformError::Overflow)?;
            let check = ParityCheck::default();
            let mut parity_ok = true;
            for i in 0..total {
                parity_ok &= check.holds(i)?;
            }
            let growth_violations = traces
                .iter()
                .map(|tr| eng.growth_violations(&tr.path).len())
                .sum();
            let rows = points
                .iter()
                .zip(&traces)
                .enumerate()
                .map(|(i, (x, tr))| PointRow {
                    point: serde_json::to_string(x).unwrap_or_default(),
                    truth: truth[i],
                    value: values[i],
                    stable: stable[i],
                    position: tr.position.to_string(),
                    depth: tr.path.len(),
                })
                .collect();
            return Ok(TransformReport {
                presentation: pres.name(),
                budgets,
                budget: b,
                tree_size: eng.tree_size().to_string(),
                xi: eng.xi()?.to_string(),
                verdict,
                parity_checked: total,
                parity_ok,
                growth_violations,
                rows,
            });
        }
        prev = Some((values, guesses));
        b *= 2;
    }
}
