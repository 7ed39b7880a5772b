//! Π⁰₂ subspaces of `P(N)` given by clauses
//! `α_n ⊆ X ⇒ ∃γ ∈ I_n. γ ⊆ X`, with the clause-based approximation relation.
//! A basic open `B_β = 𝒜 ∩ O_β` is described by the finite set `β`.

use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use super::powerset::{FinSet, SymbolicSet};
use super::{ModelError, SpaceModel};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ClauseRow {
    #[serde(default)]
    pub alpha: FinSet,
    #[serde(default)]
    pub witnesses: Vec<FinSet>,
}

/// Row generators for systems with infinitely many rows.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Generator {
    /// Row `n` is `(∅, {{j} : j ≥ n})`; the system denotes `P_∞(N)`.
    Pinf,
}

pub const DEFAULT_ROW_BOUND: usize = 64;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ClauseSystem {
    #[serde(default)]
    pub rows: Vec<ClauseRow>,
    /// Rows after the listed ones come from the generator.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub generator: Option<Generator>,
    /// Number of rows examined when a generator is present.
    #[serde(default = "default_bound")]
    pub bound: usize,
}

fn default_bound() -> usize {
    DEFAULT_ROW_BOUND
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ClauseStatus {
    NotAClause,
    UnsolvedClause,
    Solved,
}

/// `n_U`: least unsolved `U`-clause, or `Inf` within the examined rows.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum NU {
    At(usize),
    Inf { bound: usize },
}

enum Row<'a> {
    Listed(&'a ClauseRow),
    AtLeast(u32),
}

/// Order of finite sets by bitmask value: compares the largest element of
/// the symmetric difference.
pub fn bitmask_cmp(a: &FinSet, b: &FinSet) -> Ordering {
    let top = a.0.symmetric_difference(&b.0).max();
    match top {
        None => Ordering::Equal,
        Some(t) if a.contains(*t) => Ordering::Greater,
        Some(_) => Ordering::Less,
    }
}

impl ClauseSystem {
    pub fn finite(rows: Vec<ClauseRow>) -> Self {
        ClauseSystem {
            rows,
            generator: None,
            bound: DEFAULT_ROW_BOUND,
        }
    }

    /// `P_∞(N)` as the generated system `(∅, {{j}: j ≥ n})`.
    pub fn pinf(bound: usize) -> Self {
        ClauseSystem {
            rows: Vec::new(),
            generator: Some(Generator::Pinf),
            bound,
        }
    }

    /// Number of rows examined.
    pub fn examined(&self) -> usize {
        match self.generator {
            Some(_) => self.bound.max(self.rows.len()),
            None => self.rows.len(),
        }
    }

    fn row(&self, n: usize) -> Row<'_> {
        match self.rows.get(n) {
            Some(r) => Row::Listed(r),
            None => Row::AtLeast(n as u32),
        }
    }

    fn premise_in(&self, n: usize, beta: &FinSet) -> bool {
        match self.row(n) {
            Row::Listed(r) => r.alpha.is_subset(beta),
            Row::AtLeast(_) => true,
        }
    }

    fn solved_by(&self, n: usize, beta: &FinSet) -> bool {
        match self.row(n) {
            Row::Listed(r) => r.witnesses.iter().any(|g| g.is_subset(beta)),
            Row::AtLeast(k) => beta.max_elem() >= k as i64,
        }
    }

    pub fn clause_status(&self, beta: &FinSet, n: usize) -> ClauseStatus {
        if !self.premise_in(n, beta) {
            ClauseStatus::NotAClause
        } else if self.solved_by(n, beta) {
            ClauseStatus::Solved
        } else {
            ClauseStatus::UnsolvedClause
        }
    }

    pub fn n_u(&self, beta: &FinSet) -> NU {
        (0..self.examined())
            .find(|&n| self.clause_status(beta, n) == ClauseStatus::UnsolvedClause)
            .map_or(
                NU::Inf {
                    bound: self.examined(),
                },
                NU::At,
            )
    }

    /// `B_β ≪ B_β'` by the three-case definition; containment is read
    /// syntactically as `β ⊆ β'`.
    pub fn clause_ll(&self, beta: &FinSet, beta2: &FinSet) -> bool {
        if !beta.is_subset(beta2) {
            return false;
        }
        match self.n_u(beta) {
            NU::Inf { .. } => true,
            NU::At(n) => {
                self.solved_by(n, beta2)
                    || (0..n).any(|m| {
                        !self.premise_in(m, beta)
                            && self.premise_in(m, beta2)
                            && self.solved_by(m, beta2)
                    })
            }
        }
    }

    /// Does the point satisfy every examined clause? Generated rows need
    /// arbitrarily large elements, i.e. an infinite point.
    pub fn first_failed_clause(&self, x: &SymbolicSet) -> Option<usize> {
        for (n, r) in self.rows.iter().enumerate() {
            if x.includes(&r.alpha) && !r.witnesses.iter().any(|g| x.includes(g)) {
                return Some(n);
            }
        }
        if self.generator.is_some() && !x.is_infinite() {
            return Some(self.rows.len());
        }
        None
    }

    /// Condition (3): a refinement of `B_β` around `x` solving clause `n_U`.
    pub fn refine_witness(&self, x: &SymbolicSet, beta: &FinSet) -> Result<FinSet, ModelError> {
        if !x.includes(beta) {
            return Err(ModelError::NotInOpen);
        }
        let n = match self.n_u(beta) {
            NU::Inf { .. } => return Ok(beta.clone()),
            NU::At(n) => n,
        };
        let gamma = match self.row(n) {
            Row::Listed(r) => r.witnesses.iter().find(|g| x.includes(g)).cloned(),
            Row::AtLeast(k) => x.least_at_least(k).map(|j| FinSet::new([j])),
        }
        .ok_or(ModelError::PointFailsClause(n))?;
        Ok(beta.union(&gamma))
    }

    fn mentioned_max(&self) -> i64 {
        self.rows
            .iter()
            .flat_map(|r| {
                std::iter::once(r.alpha.max_elem()).chain(r.witnesses.iter().map(|g| g.max_elem()))
            })
            .max()
            .unwrap_or(-1)
    }

    fn close_with_tail(&self, delta: FinSet) -> SymbolicSet {
        match self.generator {
            Some(_) => {
                let t = self.mentioned_max().max(delta.max_elem()) + 1;
                SymbolicSet::with_tail(delta, t as u32)
            }
            None => SymbolicSet::finite(delta),
        }
    }

    /// The union of a `≪`-chain, completed by further condition-(3) steps on
    /// listed rows, plus a tail when rows are generated.
    pub fn chain_limit(&self, chain: &[FinSet]) -> Result<SymbolicSet, ModelError> {
        if chain.is_empty() {
            return Err(ModelError::EmptyChain);
        }
        for (k, w) in chain.windows(2).enumerate() {
            if !self.clause_ll(&w[0], &w[1]) {
                return Err(ModelError::ChainBroken(k + 1));
            }
        }
        let mut delta = chain.iter().fold(FinSet::empty(), |a, b| a.union(b));
        for _ in 0..=self.rows.len() {
            match self.n_u(&delta) {
                NU::At(n) if n < self.rows.len() => {
                    let g = self.rows[n]
                        .witnesses
                        .first()
                        .ok_or(ModelError::ClauseViolated(n))?;
                    delta = delta.union(g);
                }
                _ => break,
            }
        }
        let x = self.close_with_tail(delta);
        if let Some(n) = self.first_failed_clause(&x) {
            return Err(ModelError::ClauseViolated(n));
        }
        if let Some(i) = chain.iter().position(|b| !x.includes(b)) {
            return Err(ModelError::LimitMisses(i));
        }
        Ok(x)
    }

    /// Some point of `B_β`, by depth-first choice of witnesses for violated
    /// listed clauses.
    pub fn find_member(&self, beta: &FinSet, budget: usize) -> Option<SymbolicSet> {
        let mut spent = 0;
        let delta = self.member_rec(beta.clone(), &mut spent, budget)?;
        Some(self.close_with_tail(delta))
    }

    fn member_rec(&self, delta: FinSet, spent: &mut usize, budget: usize) -> Option<FinSet> {
        *spent += 1;
        if *spent > budget {
            return None;
        }
        let violated = self.rows.iter().position(|r| {
            r.alpha.is_subset(&delta) && !r.witnesses.iter().any(|g| g.is_subset(&delta))
        });
        match violated {
            None => Some(delta),
            Some(n) => self.rows[n]
                .witnesses
                .iter()
                .find_map(|g| self.member_rec(delta.union(g), spent, budget)),
        }
    }

    /// Least `β'` in bitmask order with `β ⊆ β' ⊆ x` and `β ≪ β'`.
    pub fn least_successor(&self, beta: &FinSet, x: &SymbolicSet) -> Result<FinSet, ModelError> {
        if !x.includes(beta) {
            return Err(ModelError::NotInOpen);
        }
        let n = match self.n_u(beta) {
            NU::Inf { .. } => return Ok(beta.clone()),
            NU::At(n) => n,
        };
        // every successor contains β plus the data of one solving clause
        let mut cands: Vec<FinSet> = Vec::new();
        match self.row(n) {
            Row::Listed(r) => cands.extend(r.witnesses.iter().cloned()),
            Row::AtLeast(k) => cands.extend(x.least_at_least(k).map(|j| FinSet::new([j]))),
        }
        for m in 0..n {
            if self.premise_in(m, beta) {
                continue;
            }
            if let Row::Listed(r) = self.row(m) {
                cands.extend(r.witnesses.iter().map(|g| r.alpha.union(g)));
            }
        }
        cands
            .into_iter()
            .map(|w| beta.union(&w))
            .filter(|s| x.includes(s))
            .min_by(bitmask_cmp)
            .ok_or(ModelError::PointFailsClause(n))
    }
}

pub const MEMBER_BUDGET: usize = 100_000;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClauseModel {
    pub sys: ClauseSystem,
}

impl SpaceModel for ClauseModel {
    type Open = FinSet;
    type Point = SymbolicSet;

    fn name(&self) -> &'static str {
        "clauses"
    }

    fn basis(&self, n: usize) -> Option<FinSet> {
        Some(FinSet::from_bits(n as u64))
    }

    fn contains(&self, u: &FinSet, x: &SymbolicSet) -> bool {
        x.includes(u) && self.sys.first_failed_clause(x).is_none()
    }

    fn is_subset(&self, u: &FinSet, v: &FinSet) -> bool {
        v.is_subset(u)
    }

    fn approx(&self, u: &FinSet, v: &FinSet) -> bool {
        self.sys.clause_ll(u, v)
    }

    fn approx_at(&self, t: usize, u: &FinSet, v: &FinSet) -> bool {
        self.approx(u, v) && u.max_elem() < t as i64 && v.max_elem() < t as i64
    }

    fn sample_point(&self, u: &FinSet) -> Option<SymbolicSet> {
        self.sys.find_member(u, MEMBER_BUDGET)
    }

    fn least_inside(
        &self,
        x: &SymbolicSet,
        u: &FinSet,
        _bound: usize,
    ) -> Result<FinSet, ModelError> {
        if self.contains(u, x) {
            Ok(u.clone())
        } else {
            Err(ModelError::NotInOpen)
        }
    }

    fn least_successor(
        &self,
        c: &FinSet,
        x: &SymbolicSet,
        _bound: usize,
    ) -> Result<FinSet, ModelError> {
        self.sys.least_successor(c, x)
    }

    fn limit_point(&self, chain: &[FinSet]) -> Result<SymbolicSet, ModelError> {
        self.sys.chain_limit(chain)
    }
}

impl super::MoveSampler for ClauseModel {
    fn random_move<R: rand::Rng>(
        &self,
        rng: &mut R,
        within: Option<&FinSet>,
    ) -> Option<(SymbolicSet, FinSet)> {
        let base = within.cloned().unwrap_or_default();
        for _ in 0..64 {
            let mut b = base.clone();
            for i in 0..super::powerset::RANDOM_UNIVERSE {
                if rng.gen_bool(0.15) {
                    b.0.insert(i);
                }
            }
            if let Some(x) = self.sys.find_member(&b, MEMBER_BUDGET) {
                let u = FinSet(
                    base.0
                        .union(&b.0.iter().copied().filter(|_| rng.gen_bool(0.5)).collect())
                        .copied()
                        .collect(),
                );
                return Some((x, u));
            }
        }
        let x = self.sys.find_member(&base, MEMBER_BUDGET)?;
        Some((x, base))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::space_models::powerset::PInfinityModel;
    use crate::space_models::{linear_least, SpaceModel};

    fn fs(v: &[u32]) -> FinSet {
        FinSet::new(v.iter().copied())
    }

    fn single_row() -> ClauseSystem {
        ClauseSystem::finite(vec![ClauseRow {
            alpha: fs(&[0]),
            witnesses: vec![fs(&[1])],
        }])
    }

    #[test]
    fn status_examples() {
        let s = single_row();
        assert_eq!(s.clause_status(&fs(&[2]), 0), ClauseStatus::NotAClause);
        assert_eq!(s.clause_status(&fs(&[0, 1]), 0), ClauseStatus::Solved);
        assert_eq!(s.clause_status(&fs(&[0]), 0), ClauseStatus::UnsolvedClause);
        let p = ClauseSystem::pinf(16);
        assert_eq!(p.clause_status(&fs(&[3]), 3), ClauseStatus::Solved);
        assert_eq!(p.clause_status(&fs(&[3]), 4), ClauseStatus::UnsolvedClause);
        assert_eq!(p.n_u(&fs(&[])), NU::At(0));
        assert_eq!(p.n_u(&fs(&[20])), NU::Inf { bound: 16 });
    }

    #[test]
    fn generated_system_reproduces_pinf_relation() {
        let p = ClauseSystem::pinf(16);
        for a in 0..128u64 {
            for b in 0..128u64 {
                let (a, b) = (FinSet::from_bits(a), FinSet::from_bits(b));
                assert_eq!(
                    p.clause_ll(&a, &b),
                    PInfinityModel::relation(&a, &b),
                    "{a} {b}"
                );
            }
        }
    }

    #[test]
    fn refine_examples() {
        let p = ClauseSystem::pinf(16);
        let x = SymbolicSet::with_tail(fs(&[0, 5]), 9);
        assert_eq!(p.refine_witness(&x, &fs(&[0])).unwrap(), fs(&[0, 5]));
        assert!(p.refine_witness(&x, &fs(&[1])).is_err());
        let s = single_row();
        let y = SymbolicSet::finite(fs(&[2]));
        assert_eq!(s.refine_witness(&y, &fs(&[2])).unwrap(), fs(&[2]));
        let bad = SymbolicSet::finite(fs(&[0]));
        assert_eq!(
            s.refine_witness(&bad, &fs(&[0])),
            Err(ModelError::PointFailsClause(0))
        );
    }

    #[test]
    fn chain_limit_examples() {
        let p = ClauseSystem::pinf(16);
        let x = p.chain_limit(&[fs(&[]), fs(&[0]), fs(&[0, 1])]).unwrap();
        assert!(x.includes(&fs(&[0, 1])) && x.is_infinite());
        assert_eq!(
            p.chain_limit(&[fs(&[0]), fs(&[0])]),
            Err(ModelError::ChainBroken(1))
        );
        let s = single_row();
        let y = s.chain_limit(&[fs(&[2]), fs(&[2])]).unwrap();
        assert_eq!(y, SymbolicSet::finite(fs(&[2])));
        let z = s.chain_limit(&[fs(&[0]), fs(&[0, 1])]).unwrap();
        assert_eq!(z, SymbolicSet::finite(fs(&[0, 1])));
    }

    #[test]
    fn limit_completes_pending_clauses() {
        let s = ClauseSystem::finite(vec![
            ClauseRow {
                alpha: fs(&[0]),
                witnesses: vec![fs(&[1])],
            },
            ClauseRow {
                alpha: fs(&[1]),
                witnesses: vec![fs(&[2]), fs(&[3])],
            },
        ]);
        let x = s.chain_limit(&[fs(&[0])]).unwrap();
        assert_eq!(x, SymbolicSet::finite(fs(&[0, 1, 2])));
        let dead = ClauseSystem::finite(vec![ClauseRow {
            alpha: fs(&[0]),
            witnesses: vec![],
        }]);
        assert_eq!(
            dead.chain_limit(&[fs(&[0])]),
            Err(ModelError::ClauseViolated(0))
        );
        assert_eq!(dead.find_member(&fs(&[0]), 100), None);
    }

    #[test]
    fn least_successor_matches_linear_scan() {
        let s = ClauseSystem::finite(vec![
            ClauseRow {
                alpha: fs(&[0]),
                witnesses: vec![fs(&[3]), fs(&[1, 2])],
            },
            ClauseRow {
                alpha: fs(&[]),
                witnesses: vec![fs(&[4]), fs(&[5])],
            },
            ClauseRow {
                alpha: fs(&[2]),
                witnesses: vec![fs(&[6])],
            },
        ]);
        let m = ClauseModel { sys: s.clone() };
        for xb in 0..256u64 {
            let x = SymbolicSet::finite(FinSet::from_bits(xb));
            if s.first_failed_clause(&x).is_some() {
                continue;
            }
            for cb in 0..256u64 {
                let c = FinSet::from_bits(cb);
                if !x.includes(&c) {
                    continue;
                }
                let fast = m.least_successor(&c, &x, 0).unwrap();
                let slow = linear_least(&m, 256, |b| m.contains(b, &x) && m.approx(&c, b)).unwrap();
                assert_eq!(fast, slow, "x={x} c={c}");
            }
        }
    }

    #[test]
    fn json_rows() {
        let s: ClauseSystem = serde_json::from_str(
            r#"{"rows":[{"alpha":[0],"witnesses":[[1]]}],"generator":"pinf","bound":8}"#,
        )
        .unwrap();
        assert_eq!(s.rows.len(), 1);
        assert_eq!(s.examined(), 8);
    }
}
