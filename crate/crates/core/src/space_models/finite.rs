//! Finite posets with the Scott (upset) topology as space models.

use serde::{Deserialize, Serialize};

use super::{MoveSampler, SpaceModel, UnionClosed};
use crate::finite_space::{FinitePoset, PointSet};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FiniteBasis {
    /// Principal upsets `↑b`, ordered by `(|↑b|, b)`.
    Principal,
    /// All nonempty opens, ordered by `(size, bitmask)`.
    AllOpens,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FiniteRelation {
    /// `C ≪ D ⟺ D ≠ ∅ ∧ ∃c ∈ C. D ⊆ ↑c`
    WayBelow,
    /// `C ≪ D ⟺ ∅ ≠ D ⊆ C`
    Inclusion,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FinitePosetModel {
    poset: FinitePoset,
    basis_kind: FiniteBasis,
    relation: FiniteRelation,
    basis: Vec<PointSet>,
}

impl FinitePosetModel {
    pub fn new(poset: FinitePoset, basis_kind: FiniteBasis, relation: FiniteRelation) -> Self {
        let mut basis: Vec<PointSet> = match basis_kind {
            FiniteBasis::Principal => {
                let mut ups: Vec<(usize, usize)> =
                    (0..poset.len()).map(|b| (poset.up(b).len(), b)).collect();
                ups.sort();
                ups.into_iter().map(|(_, b)| poset.up(b)).collect()
            }
            FiniteBasis::AllOpens => poset
                .opens()
                .into_iter()
                .filter(|o| !o.is_empty())
                .collect(),
        };
        if basis_kind == FiniteBasis::AllOpens {
            basis.sort_by_key(|o| (o.len(), o.0));
        }
        FinitePosetModel {
            poset,
            basis_kind,
            relation,
            basis,
        }
    }

    pub fn poset(&self) -> &FinitePoset {
        &self.poset
    }

    pub fn basis_kind(&self) -> FiniteBasis {
        self.basis_kind
    }

    pub fn relation(&self) -> FiniteRelation {
        self.relation
    }

    pub fn basis_sets(&self) -> &[PointSet] {
        &self.basis
    }

    pub fn index_of(&self, u: PointSet) -> Option<usize> {
        self.basis.iter().position(|&b| b == u)
    }
}

impl SpaceModel for FinitePosetModel {
    type Open = PointSet;
    type Point = usize;

    fn name(&self) -> &'static str {
        "poset"
    }

    fn basis(&self, n: usize) -> Option<PointSet> {
        self.basis.get(n).copied()
    }

    fn basis_len(&self) -> Option<usize> {
        Some(self.basis.len())
    }

    fn contains(&self, u: &PointSet, x: &usize) -> bool {
        u.contains(*x)
    }

    fn is_subset(&self, u: &PointSet, v: &PointSet) -> bool {
        u.is_subset(*v)
    }

    fn approx(&self, c: &PointSet, d: &PointSet) -> bool {
        if d.is_empty() {
            return false;
        }
        match self.relation {
            FiniteRelation::WayBelow => c.iter().any(|x| d.is_subset(self.poset.up(x))),
            FiniteRelation::Inclusion => d.is_subset(*c),
        }
    }

    fn sample_point(&self, u: &PointSet) -> Option<usize> {
        (*u).min()
    }

    fn is_finite(&self) -> bool {
        true
    }
}

impl UnionClosed for FinitePosetModel {
    fn union(&self, parts: &[PointSet]) -> Option<PointSet> {
        let u = parts.iter().fold(PointSet::EMPTY, |a, &b| a.union(b));
        self.index_of(u).map(|_| u)
    }
}

impl MoveSampler for FinitePosetModel {
    fn random_move<R: rand::Rng>(
        &self,
        rng: &mut R,
        within: Option<&PointSet>,
    ) -> Option<(usize, PointSet)> {
        let w = within.copied().unwrap_or(self.poset.carrier());
        let pts: Vec<usize> = w.iter().collect();
        if pts.is_empty() {
            return None;
        }
        let x = pts[rng.gen_range(0..pts.len())];
        let cands: Vec<PointSet> = self
            .basis
            .iter()
            .copied()
            .filter(|b| b.contains(x) && b.is_subset(w))
            .collect();
        if cands.is_empty() {
            // fall back to the open itself, which is legal even off-basis
            return Some((x, w));
        }
        Some((x, cands[rng.gen_range(0..cands.len())]))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn three_chain_strategy_searches() {
        let m = FinitePosetModel::new(
            FinitePoset::chain(3),
            FiniteBasis::Principal,
            FiniteRelation::Inclusion,
        );
        let shown: Vec<String> = m.basis_sets().iter().map(|s| s.to_string()).collect();
        assert_eq!(shown, vec!["{2}", "{1,2}", "{0,1,2}"]);
        let whole = m.poset().carrier();
        let c = m.least_inside(&1, &whole, 100).unwrap();
        assert_eq!(c, PointSet::from_points([1, 2]));
        let b = m.least_successor(&c, &1, 100).unwrap();
        assert_eq!(b, PointSet::from_points([1, 2]));
    }

    #[test]
    fn way_below_on_disconnected_space() {
        let p = FinitePoset::chain(2)
            .disjoint_union(&FinitePoset::antichain(1))
            .unwrap();
        let m = FinitePosetModel::new(p, FiniteBasis::AllOpens, FiniteRelation::WayBelow);
        let e = m.poset().carrier();
        // the whole space is not way below itself: it has no least point
        assert!(!m.approx(&e, &e));
        assert!(m.approx(&e, &PointSet::singleton(2)));
        assert!(m.approx(&PointSet::singleton(1), &PointSet::singleton(1)));
        assert!(!m.approx(&e, &PointSet::EMPTY));
        assert!(m
            .union(&[PointSet::singleton(1), PointSet::singleton(2)])
            .is_some());
    }
}
