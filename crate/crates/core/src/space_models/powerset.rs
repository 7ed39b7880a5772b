//! `P(N)` with the Scott topology and its subspace `P_∞(N)` of infinite sets.
//! Basic opens are `O_A = {X : A ⊆ X}` for finite `A`, enumerated by the
//! bitmask of `A`.

use std::collections::BTreeSet;
use std::fmt;

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{check_chain, verify_in_all, ModelError, MoveSampler, SpaceModel};

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct FinSet(pub BTreeSet<u32>);

impl FinSet {
    pub fn new<I: IntoIterator<Item = u32>>(it: I) -> Self {
        FinSet(it.into_iter().collect())
    }

    pub fn empty() -> Self {
        FinSet::default()
    }

    /// The set whose bitmask is `n`.
    pub fn from_bits(n: u64) -> Self {
        FinSet((0..64).filter(|i| n >> i & 1 == 1).collect())
    }

    /// Bitmask, if every element is below 64.
    pub fn bits(&self) -> Option<u64> {
        self.0
            .iter()
            .try_fold(0u64, |acc, &i| (i < 64).then(|| acc | 1 << i))
    }

    pub fn contains(&self, i: u32) -> bool {
        self.0.contains(&i)
    }

    pub fn is_subset(&self, o: &FinSet) -> bool {
        self.0.is_subset(&o.0)
    }

    pub fn union(&self, o: &FinSet) -> FinSet {
        FinSet(self.0.union(&o.0).copied().collect())
    }

    /// Largest element, with `max ∅ = -1`.
    pub fn max_elem(&self) -> i64 {
        self.0.iter().next_back().map_or(-1, |&m| m as i64)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = u32> + '_ {
        self.0.iter().copied()
    }
}

impl fmt::Display for FinSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (k, i) in self.0.iter().enumerate() {
            if k > 0 {
                write!(f, ",")?;
            }
            write!(f, "{i}")?;
        }
        write!(f, "}}")
    }
}

/// A subset of `N` given by finite data: `finite ∪ [tail_from, ∞)`.
/// A tail stands for the "grow forever" part of a limit point.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SymbolicSet {
    pub finite: FinSet,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tail_from: Option<u32>,
}

impl SymbolicSet {
    pub fn finite(s: FinSet) -> Self {
        SymbolicSet {
            finite: s,
            tail_from: None,
        }
    }

    pub fn with_tail(s: FinSet, tail_from: u32) -> Self {
        let finite = FinSet(s.0.into_iter().filter(|&i| i < tail_from).collect());
        SymbolicSet {
            finite,
            tail_from: Some(tail_from),
        }
    }

    pub fn contains(&self, i: u32) -> bool {
        self.finite.contains(i) || self.tail_from.is_some_and(|t| i >= t)
    }

    pub fn includes(&self, a: &FinSet) -> bool {
        a.iter().all(|i| self.contains(i))
    }

    pub fn is_infinite(&self) -> bool {
        self.tail_from.is_some()
    }

    /// Least element `≥ n`, if any.
    pub fn least_at_least(&self, n: u32) -> Option<u32> {
        let f = self.finite.0.range(n..).next().copied();
        let t = self.tail_from.map(|t| t.max(n));
        match (f, t) {
            (Some(a), Some(b)) => Some(a.min(b)),
            (a, b) => a.or(b),
        }
    }
}

impl fmt::Display for SymbolicSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.finite)?;
        if let Some(t) = self.tail_from {
            write!(f, " ∪ [{t},∞)")?;
        }
        Ok(())
    }
}

/// `P(N)` with `O_A ≪ O_B ⟺ A ⊆ B` (the continuous-domain relation).
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct PowersetModel;

fn below_stage(t: usize, sets: &[&FinSet]) -> bool {
    sets.iter().all(|s| s.max_elem() < t as i64)
}

impl SpaceModel for PowersetModel {
    type Open = FinSet;
    type Point = SymbolicSet;

    fn name(&self) -> &'static str {
        "pn"
    }

    fn basis(&self, n: usize) -> Option<FinSet> {
        Some(FinSet::from_bits(n as u64))
    }

    fn contains(&self, u: &FinSet, x: &SymbolicSet) -> bool {
        x.includes(u)
    }

    fn is_subset(&self, u: &FinSet, v: &FinSet) -> bool {
        v.is_subset(u)
    }

    fn approx(&self, u: &FinSet, v: &FinSet) -> bool {
        u.is_subset(v)
    }

    fn approx_at(&self, t: usize, u: &FinSet, v: &FinSet) -> bool {
        self.approx(u, v) && below_stage(t, &[u, v])
    }

    fn sample_point(&self, u: &FinSet) -> Option<SymbolicSet> {
        Some(SymbolicSet::finite(u.clone()))
    }

    fn least_inside(
        &self,
        x: &SymbolicSet,
        u: &FinSet,
        _bound: usize,
    ) -> Result<FinSet, ModelError> {
        if x.includes(u) {
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
        self.least_inside(x, c, 0)
    }

    fn limit_point(&self, chain: &[FinSet]) -> Result<SymbolicSet, ModelError> {
        check_chain(self, chain)?;
        let x = SymbolicSet::finite(chain.iter().fold(FinSet::empty(), |a, b| a.union(b)));
        verify_in_all(self, chain, &x)?;
        Ok(x)
    }
}

fn random_extension<R: Rng>(rng: &mut R, base: &FinSet, universe: u32) -> FinSet {
    let mut s = base.clone();
    for i in 0..universe {
        if rng.gen_bool(0.3) {
            s.0.insert(i);
        }
    }
    s
}

/// Elements used by random moves stay below this bound so that basis
/// indices fit in 64 bits.
pub const RANDOM_UNIVERSE: u32 = 24;

impl MoveSampler for PowersetModel {
    fn random_move<R: Rng>(
        &self,
        rng: &mut R,
        within: Option<&FinSet>,
    ) -> Option<(SymbolicSet, FinSet)> {
        let base = within.cloned().unwrap_or_default();
        let x = random_extension(rng, &base, RANDOM_UNIVERSE);
        let u = FinSet(
            base.0
                .union(&x.0.iter().copied().filter(|_| rng.gen_bool(0.3)).collect())
                .copied()
                .collect(),
        );
        Some((SymbolicSet::finite(x), u))
    }
}

/// `P_∞(N)` with `O_A ≪ O_B ⟺ A ⊆ B ∧ max A < max B`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct PInfinityModel;

impl PInfinityModel {
    pub fn relation(a: &FinSet, b: &FinSet) -> bool {
        a.is_subset(b) && a.max_elem() < b.max_elem()
    }
}

impl SpaceModel for PInfinityModel {
    type Open = FinSet;
    type Point = SymbolicSet;

    fn name(&self) -> &'static str {
        "pinf"
    }

    fn basis(&self, n: usize) -> Option<FinSet> {
        Some(FinSet::from_bits(n as u64))
    }

    fn contains(&self, u: &FinSet, x: &SymbolicSet) -> bool {
        x.is_infinite() && x.includes(u)
    }

    fn is_subset(&self, u: &FinSet, v: &FinSet) -> bool {
        v.is_subset(u)
    }

    fn approx(&self, u: &FinSet, v: &FinSet) -> bool {
        Self::relation(u, v)
    }

    fn approx_at(&self, t: usize, u: &FinSet, v: &FinSet) -> bool {
        self.approx(u, v) && below_stage(t, &[u, v])
    }

    fn sample_point(&self, u: &FinSet) -> Option<SymbolicSet> {
        Some(SymbolicSet::with_tail(u.clone(), (u.max_elem() + 1) as u32))
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

    /// Adds the least element of `x` above `max C`; the smallest bitmask
    /// that raises the maximum.
    fn least_successor(
        &self,
        c: &FinSet,
        x: &SymbolicSet,
        _bound: usize,
    ) -> Result<FinSet, ModelError> {
        if !self.contains(c, x) {
            return Err(ModelError::NotInOpen);
        }
        let j = x
            .least_at_least((c.max_elem() + 1) as u32)
            .ok_or(ModelError::NotInOpen)?;
        let mut b = c.clone();
        b.0.insert(j);
        Ok(b)
    }

    fn limit_point(&self, chain: &[FinSet]) -> Result<SymbolicSet, ModelError> {
        check_chain(self, chain)?;
        let u = chain.iter().fold(FinSet::empty(), |a, b| a.union(b));
        let x = SymbolicSet::with_tail(u.clone(), (u.max_elem() + 1) as u32);
        verify_in_all(self, chain, &x)?;
        Ok(x)
    }
}

impl MoveSampler for PInfinityModel {
    fn random_move<R: Rng>(
        &self,
        rng: &mut R,
        within: Option<&FinSet>,
    ) -> Option<(SymbolicSet, FinSet)> {
        let base = within.cloned().unwrap_or_default();
        let ext = random_extension(rng, &base, RANDOM_UNIVERSE);
        let tail = RANDOM_UNIVERSE + rng.gen_range(0..8);
        let x = SymbolicSet::with_tail(ext.clone(), tail);
        let u = FinSet(
            base.0
                .union(
                    &ext.0
                        .iter()
                        .copied()
                        .filter(|_| rng.gen_bool(0.3))
                        .collect(),
                )
                .copied()
                .collect(),
        );
        Some((x, u))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::space_models::linear_least;

    fn fs(v: &[u32]) -> FinSet {
        FinSet::new(v.iter().copied())
    }

    #[test]
    fn pinf_relation_examples() {
        let m = PInfinityModel;
        assert!(m.approx(&fs(&[0]), &fs(&[0, 3])));
        assert!(!m.approx(&fs(&[2]), &fs(&[2])));
        assert!(m.approx(&fs(&[]), &fs(&[0])));
        assert!(!m.approx(&fs(&[1]), &fs(&[0, 5])));
    }

    #[test]
    fn closed_form_searches_match_linear_scan() {
        let m = PInfinityModel;
        let pts = [
            SymbolicSet::with_tail(fs(&[0, 2, 5]), 7),
            SymbolicSet::with_tail(fs(&[1]), 3),
            SymbolicSet::with_tail(fs(&[]), 4),
        ];
        for x in &pts {
            for bits in 0..64u64 {
                let u = FinSet::from_bits(bits);
                if !m.contains(&u, x) {
                    continue;
                }
                let c = m.least_inside(x, &u, 0).unwrap();
                let c2 = linear_least(&m, 256, |c| m.contains(c, x) && m.is_subset(c, &u)).unwrap();
                assert_eq!(c, c2);
                let b = m.least_successor(&c, x, 0).unwrap();
                let b2 = linear_least(&m, 256, |b| m.contains(b, x) && m.approx(&c, b)).unwrap();
                assert_eq!(b, b2);
            }
        }
    }

    #[test]
    fn pinf_limit_point() {
        let m = PInfinityModel;
        let chain = vec![fs(&[]), fs(&[0]), fs(&[0, 1])];
        let x = m.limit_point(&chain).unwrap();
        assert_eq!(x.to_string(), "{0,1} ∪ [2,∞)");
        assert_eq!(
            m.limit_point(&[fs(&[2]), fs(&[2])]),
            Err(ModelError::ChainBroken(1))
        );
    }

    #[test]
    fn symbolic_set_serde() {
        let x = SymbolicSet::with_tail(fs(&[0, 5, 9]), 9);
        let s = serde_json::to_string(&x).unwrap();
        assert_eq!(s, r#"{"finite":[0,5],"tail_from":9}"#);
        assert_eq!(serde_json::from_str::<SymbolicSet>(&s).unwrap(), x);
    }
}
