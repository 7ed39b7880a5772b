//! Finite posets with the Alexandrov (upper-set) topology.
//!
//! Opens are upsets, closed sets are downsets and the specialization order of
//! the topology is the poset order itself. Subsets are `u64` bitmasks, so a
//! poset has at most 64 points.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub const MAX_POINTS: usize = 64;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PosetError {
    #[error("poset has {0} points; at most 64 are supported")]
    TooLarge(usize),
    #[error("point {0} is out of range")]
    OutOfRange(usize),
    #[error("order is not antisymmetric: {0} and {1} are equivalent")]
    NotAntisymmetric(usize, usize),
    #[error("relation is not reflexive at {0}")]
    NotReflexive(usize),
    #[error("relation is not transitive at ({0}, {1}, {2})")]
    NotTransitive(usize, usize, usize),
    #[error("set {0} is not open")]
    NotOpen(PointSet),
    #[error("malformed point set `{0}`")]
    BadSet(String),
    #[error("malformed poset JSON: {0}")]
    Json(String),
}

/// A subset of a finite poset's carrier as a bitmask.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct PointSet(pub u64);

impl PointSet {
    pub const EMPTY: PointSet = PointSet(0);

    pub fn full(n: usize) -> PointSet {
        if n >= 64 {
            PointSet(u64::MAX)
        } else {
            PointSet((1u64 << n) - 1)
        }
    }

    pub fn singleton(i: usize) -> PointSet {
        PointSet(1u64 << i)
    }

    pub fn from_points<I: IntoIterator<Item = usize>>(it: I) -> PointSet {
        PointSet(it.into_iter().fold(0, |acc, i| acc | (1u64 << i)))
    }

    pub fn contains(self, i: usize) -> bool {
        i < 64 && self.0 >> i & 1 == 1
    }

    pub fn insert(&mut self, i: usize) {
        self.0 |= 1u64 << i;
    }

    pub fn union(self, o: PointSet) -> PointSet {
        PointSet(self.0 | o.0)
    }

    pub fn intersection(self, o: PointSet) -> PointSet {
        PointSet(self.0 & o.0)
    }

    pub fn difference(self, o: PointSet) -> PointSet {
        PointSet(self.0 & !o.0)
    }

    pub fn complement_in(self, carrier: PointSet) -> PointSet {
        carrier.difference(self)
    }

    pub fn is_subset(self, o: PointSet) -> bool {
        self.0 & !o.0 == 0
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn iter(self) -> impl Iterator<Item = usize> {
        let bits = self.0;
        (0..64).filter(move |i| bits >> i & 1 == 1)
    }

    pub fn min(self) -> Option<usize> {
        if self.0 == 0 {
            None
        } else {
            Some(self.0.trailing_zeros() as usize)
        }
    }
}

impl fmt::Display for PointSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (k, i) in self.iter().enumerate() {
            if k > 0 {
                write!(f, ",")?;
            }
            write!(f, "{i}")?;
        }
        write!(f, "}}")
    }
}

impl FromStr for PointSet {
    type Err = PosetError;

    /// Accepts `1,2`, `{1,2}`, `[1, 2]`, `{}` and `∅`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let t = s.trim();
        if t == "∅" {
            return Ok(PointSet::EMPTY);
        }
        let t = t
            .strip_prefix('{')
            .and_then(|r| r.strip_suffix('}'))
            .or_else(|| t.strip_prefix('[').and_then(|r| r.strip_suffix(']')))
            .unwrap_or(t);
        let mut out = PointSet::EMPTY;
        for part in t.split(',') {
            let p = part.trim();
            if p.is_empty() {
                continue;
            }
            let i: usize = p.parse().map_err(|_| PosetError::BadSet(s.to_string()))?;
            if i >= MAX_POINTS {
                return Err(PosetError::OutOfRange(i));
            }
            out.insert(i);
        }
        Ok(out)
    }
}

impl Serialize for PointSet {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(self.iter())
    }
}

impl<'de> Deserialize<'de> for PointSet {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let v = Vec::<usize>::deserialize(d)?;
        if let Some(&i) = v.iter().find(|&&i| i >= MAX_POINTS) {
            return Err(serde::de::Error::custom(PosetError::OutOfRange(i)));
        }
        Ok(PointSet::from_points(v))
    }
}

/// Wire form: `{"n": 3, "cover": [[0,1],[1,2]]}`, each pair meaning `a ≤ b`.
/// The order is the reflexive-transitive closure of the listed pairs.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
#[serde(deny_unknown_fields)]
pub struct PosetJson {
    pub n: usize,
    #[serde(default)]
    pub cover: Vec<(usize, usize)>,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FinitePoset {
    n: usize,
    up: Vec<PointSet>,
    down: Vec<PointSet>,
}

impl FinitePoset {
    /// Builds a poset from a full order relation, checking the axioms.
    pub fn from_leq<F: Fn(usize, usize) -> bool>(n: usize, leq: F) -> Result<Self, PosetError> {
        if n > MAX_POINTS {
            return Err(PosetError::TooLarge(n));
        }
        for i in 0..n {
            if !leq(i, i) {
                return Err(PosetError::NotReflexive(i));
            }
            for j in 0..n {
                if i != j && leq(i, j) && leq(j, i) {
                    return Err(PosetError::NotAntisymmetric(i, j));
                }
                for k in 0..n {
                    if leq(i, j) && leq(j, k) && !leq(i, k) {
                        return Err(PosetError::NotTransitive(i, j, k));
                    }
                }
            }
        }
        let up = (0..n)
            .map(|i| PointSet::from_points((0..n).filter(|&j| leq(i, j))))
            .collect();
        let down = (0..n)
            .map(|i| PointSet::from_points((0..n).filter(|&j| leq(j, i))))
            .collect();
        Ok(FinitePoset { n, up, down })
    }

    /// Reflexive-transitive closure of `pairs` (each `(a, b)` meaning `a ≤ b`).
    pub fn from_cover(n: usize, pairs: &[(usize, usize)]) -> Result<Self, PosetError> {
        if n > MAX_POINTS {
            return Err(PosetError::TooLarge(n));
        }
        let mut up: Vec<PointSet> = (0..n).map(PointSet::singleton).collect();
        for &(a, b) in pairs {
            if a >= n {
                return Err(PosetError::OutOfRange(a));
            }
            if b >= n {
                return Err(PosetError::OutOfRange(b));
            }
            up[a].insert(b);
        }
        // Warshall on bitmasks.
        for k in 0..n {
            for i in 0..n {
                if up[i].contains(k) {
                    up[i] = up[i].union(up[k]);
                }
            }
        }
        for i in 0..n {
            for j in (i + 1)..n {
                if up[i].contains(j) && up[j].contains(i) {
                    return Err(PosetError::NotAntisymmetric(i, j));
                }
            }
        }
        let down = (0..n)
            .map(|i| PointSet::from_points((0..n).filter(|&j| up[j].contains(i))))
            .collect();
        Ok(FinitePoset { n, up, down })
    }

    pub fn from_json_value(p: &PosetJson) -> Result<Self, PosetError> {
        Self::from_cover(p.n, &p.cover)
    }

    pub fn from_json(s: &str) -> Result<Self, PosetError> {
        let p: PosetJson = serde_json::from_str(s).map_err(|e| PosetError::Json(e.to_string()))?;
        Self::from_json_value(&p)
    }

    /// Hasse diagram as wire form.
    pub fn to_json_value(&self) -> PosetJson {
        let mut cover = Vec::new();
        for i in 0..self.n {
            for j in self.up[i].iter() {
                if i == j {
                    continue;
                }
                let between = self.up[i]
                    .intersection(self.down[j])
                    .difference(PointSet::from_points([i, j]));
                if between.is_empty() {
                    cover.push((i, j));
                }
            }
        }
        PosetJson { n: self.n, cover }
    }

    /// `0 < 1 < ... < n-1`
    pub fn chain(n: usize) -> Self {
        let pairs: Vec<_> = (1..n).map(|i| (i - 1, i)).collect();
        Self::from_cover(n, &pairs).expect("chain is a poset")
    }

    pub fn antichain(n: usize) -> Self {
        Self::from_cover(n, &[]).expect("antichain is a poset")
    }

    /// Disjoint union, the points of `other` renumbered after ours.
    pub fn disjoint_union(&self, other: &FinitePoset) -> Result<Self, PosetError> {
        let n = self.n + other.n;
        let mut pairs = self.to_json_value().cover;
        pairs.extend(
            other
                .to_json_value()
                .cover
                .into_iter()
                .map(|(a, b)| (a + self.n, b + self.n)),
        );
        Self::from_cover(n, &pairs)
    }

    /// Nonempty words over `{0..alphabet-1}` of length at most `depth`, ordered
    /// by prefix; with `with_root` the empty word is added as least element.
    /// Returns the poset and the word for each point.
    pub fn word_tree(alphabet: usize, depth: usize, with_root: bool) -> (Self, Vec<Vec<u8>>) {
        let mut words: Vec<Vec<u8>> = Vec::new();
        if with_root {
            words.push(Vec::new());
        }
        let mut layer: Vec<Vec<u8>> = vec![Vec::new()];
        for _ in 0..depth {
            let mut next = Vec::new();
            for w in &layer {
                for a in 0..alphabet {
                    let mut v = w.clone();
                    v.push(a as u8);
                    next.push(v);
                }
            }
            words.extend(next.iter().cloned());
            layer = next;
        }
        let n = words.len();
        let p = Self::from_leq(n, |i, j| words[j].starts_with(&words[i]))
            .expect("prefix order is a poset");
        (p, words)
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn carrier(&self) -> PointSet {
        PointSet::full(self.n)
    }

    pub fn leq(&self, a: usize, b: usize) -> bool {
        self.up[a].contains(b)
    }

    pub fn lt(&self, a: usize, b: usize) -> bool {
        a != b && self.leq(a, b)
    }

    /// ↑a
    pub fn up(&self, a: usize) -> PointSet {
        self.up[a]
    }

    /// ↓a
    pub fn down(&self, a: usize) -> PointSet {
        self.down[a]
    }

    pub fn up_closure(&self, s: PointSet) -> PointSet {
        s.iter()
            .fold(PointSet::EMPTY, |acc, i| acc.union(self.up[i]))
    }

    /// Topological closure: the downward closure.
    pub fn closure(&self, s: PointSet) -> PointSet {
        s.iter()
            .fold(PointSet::EMPTY, |acc, i| acc.union(self.down[i]))
    }

    /// Largest upset inside `s`.
    pub fn interior(&self, s: PointSet) -> PointSet {
        PointSet::from_points((0..self.n).filter(|&i| self.up[i].is_subset(s)))
    }

    pub fn is_open(&self, s: PointSet) -> bool {
        s.is_subset(self.carrier()) && self.up_closure(s) == s
    }

    pub fn is_closed(&self, s: PointSet) -> bool {
        s.is_subset(self.carrier()) && self.closure(s) == s
    }

    pub fn least_element(&self) -> Option<usize> {
        (0..self.n).find(|&i| self.up[i] == self.carrier())
    }

    /// Points listed so that `a < b` implies `a` comes first.
    pub fn linear_extension(&self) -> Vec<usize> {
        let mut v: Vec<usize> = (0..self.n).collect();
        v.sort_by_key(|&i| (self.down[i].len(), i));
        v
    }

    /// All open sets, in increasing bitmask order.
    pub fn opens(&self) -> Vec<PointSet> {
        let order = self.linear_extension();
        let mut out = Vec::new();
        self.opens_rec(&order, 0, PointSet::EMPTY, PointSet::EMPTY, &mut out);
        out.sort();
        out
    }

    fn opens_rec(
        &self,
        order: &[usize],
        k: usize,
        inside: PointSet,
        outside: PointSet,
        out: &mut Vec<PointSet>,
    ) {
        if k == order.len() {
            out.push(inside);
            return;
        }
        let i = order[k];
        if inside.contains(i) || outside.contains(i) {
            self.opens_rec(order, k + 1, inside, outside, out);
            return;
        }
        if self.up[i].intersection(outside).is_empty() {
            self.opens_rec(order, k + 1, inside.union(self.up[i]), outside, out);
        }
        self.opens_rec(order, k + 1, inside, outside.union(self.down[i]), out);
    }

    /// Adds a fresh point below exactly the points of `u` (which must be
    /// open); the new point gets index `len()`.
    pub fn adjoin_point_below(&self, u: PointSet) -> Result<FinitePoset, PosetError> {
        if !self.is_open(u) {
            return Err(PosetError::NotOpen(u));
        }
        if self.n + 1 > MAX_POINTS {
            return Err(PosetError::TooLarge(self.n + 1));
        }
        let n = self.n;
        Self::from_leq(n + 1, |a, b| {
            if a == n {
                b == n || u.contains(b)
            } else if b == n {
                false
            } else {
                self.leq(a, b)
            }
        })
    }

    /// Length (number of strict steps) of the longest chain.
    pub fn height(&self) -> usize {
        let mut h = vec![0usize; self.n];
        for &i in self.linear_extension().iter().rev() {
            h[i] = self.up[i]
                .iter()
                .filter(|&j| j != i)
                .map(|j| h[j] + 1)
                .max()
                .unwrap_or(0);
        }
        h.into_iter().max().unwrap_or(0)
    }

    /// Order recovered from the opens alone: `a ≤ b` iff every open holding
    /// `a` holds `b`.
    pub fn specialization_from_opens(n: usize, opens: &[PointSet]) -> Result<Self, PosetError> {
        Self::from_leq(n, |a, b| {
            opens.iter().all(|u| !u.contains(a) || u.contains(b))
        })
    }

    /// Canonical form under relabelling; only practical for small `n`.
    pub fn canonical_form(&self) -> Vec<u64> {
        let mut perm: Vec<usize> = (0..self.n).collect();
        let mut best: Option<Vec<u64>> = None;
        permute(&mut perm, 0, &mut |p| {
            let code: Vec<u64> = (0..self.n)
                .map(|i| {
                    (0..self.n)
                        .filter(|&j| self.leq(p[i], p[j]))
                        .fold(0u64, |acc, j| acc | 1 << j)
                })
                .collect();
            if best.as_ref().is_none_or(|b| code < *b) {
                best = Some(code);
            }
        });
        best.unwrap_or_default()
    }
}

fn permute<F: FnMut(&[usize])>(v: &mut Vec<usize>, k: usize, f: &mut F) {
    if k == v.len() {
        f(v);
        return;
    }
    for i in k..v.len() {
        v.swap(k, i);
        permute(v, k + 1, f);
        v.swap(k, i);
    }
}

/// One representative of every isomorphism type of poset on `n` points.
/// Every finite poset has a natural labelling (`a < b` only if `a < b` as
/// numbers), so it suffices to close strict upper-triangular relations.
pub fn all_posets(n: usize) -> Vec<FinitePoset> {
    assert!(n <= 6, "exhaustive enumeration is limited to 6 points");
    let slots: Vec<(usize, usize)> = (0..n)
        .flat_map(|i| ((i + 1)..n).map(move |j| (i, j)))
        .collect();
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    for mask in 0u64..(1u64 << slots.len()) {
        let pairs: Vec<_> = slots
            .iter()
            .enumerate()
            .filter(|(k, _)| mask >> k & 1 == 1)
            .map(|(_, &p)| p)
            .collect();
        let p = FinitePoset::from_cover(n, &pairs).expect("upper-triangular relation is acyclic");
        // keep only relations that are already transitively closed, so each
        // order is generated once
        let strict: usize = (0..n).map(|i| p.up(i).len() - 1).sum();
        if strict != pairs.len() {
            continue;
        }
        if seen.insert(p.canonical_form()) {
            out.push(p);
        }
    }
    out
}

/// Random poset: each pair `i < j` is related with probability `density`,
/// then transitively closed. Labels are then shuffled.
pub fn random_poset<R: Rng>(rng: &mut R, n: usize, density: f64) -> FinitePoset {
    let mut pairs = Vec::new();
    for i in 0..n {
        for j in (i + 1)..n {
            if rng.gen_bool(density.clamp(0.0, 1.0)) {
                pairs.push((i, j));
            }
        }
    }
    let mut label: Vec<usize> = (0..n).collect();
    for i in (1..n).rev() {
        let j = rng.gen_range(0..=i);
        label.swap(i, j);
    }
    let pairs: Vec<_> = pairs
        .into_iter()
        .map(|(a, b)| (label[a], label[b]))
        .collect();
    FinitePoset::from_cover(n, &pairs).expect("random DAG closure is a poset")
}

pub fn random_subset<R: Rng>(rng: &mut R, n: usize) -> PointSet {
    PointSet(rng.gen::<u64>() & PointSet::full(n).0)
}

/// Preimage `f⁻¹(s)` for a map given as a point table.
pub fn preimage(f: &[usize], s: PointSet) -> PointSet {
    PointSet::from_points((0..f.len()).filter(|&i| s.contains(f[i])))
}

/// Is `f: p → q` monotone (equivalently, continuous)?
pub fn is_monotone(p: &FinitePoset, q: &FinitePoset, f: &[usize]) -> bool {
    f.len() == p.len() && (0..p.len()).all(|a| p.up(a).iter().all(|b| q.leq(f[a], f[b])))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn chain_opens_are_final_segments() {
        let c = FinitePoset::chain(3);
        let o: Vec<String> = c.opens().iter().map(|s| s.to_string()).collect();
        assert_eq!(o, vec!["{}", "{2}", "{1,2}", "{0,1,2}"]);
        assert_eq!(c.closure(PointSet::singleton(1)).to_string(), "{0,1}");
        assert_eq!(c.interior(PointSet::from_points([0, 2])).to_string(), "{2}");
    }

    #[test]
    fn cover_closure_and_cycles() {
        let p = FinitePoset::from_cover(3, &[(0, 1), (1, 2)]).unwrap();
        assert!(p.leq(0, 2));
        assert_eq!(
            FinitePoset::from_cover(2, &[(0, 1), (1, 0)]),
            Err(PosetError::NotAntisymmetric(0, 1))
        );
        assert_eq!(
            FinitePoset::from_cover(2, &[(0, 5)]),
            Err(PosetError::OutOfRange(5))
        );
    }

    #[test]
    fn json_roundtrip_of_hasse_diagram() {
        let p =
            FinitePoset::from_json(r#"{"n":4,"cover":[[0,1],[0,2],[1,3],[2,3],[0,3]]}"#).unwrap();
        let j = p.to_json_value();
        assert_eq!(j.cover, vec![(0, 1), (0, 2), (1, 3), (2, 3)]);
        assert_eq!(FinitePoset::from_json_value(&j).unwrap(), p);
        assert!(FinitePoset::from_json(r#"{"n":2,"cover":[[0,1]],"x":1}"#).is_err());
    }

    #[test]
    fn adjoin_rejects_non_open() {
        let c = FinitePoset::chain(3);
        assert!(c.adjoin_point_below(PointSet::singleton(1)).is_err());
        let q = c.adjoin_point_below(PointSet::from_points([1, 2])).unwrap();
        assert!(q.leq(3, 1) && q.leq(3, 2) && !q.leq(3, 0) && !q.leq(0, 3));
    }

    #[test]
    fn isomorphism_type_counts() {
        let counts: Vec<usize> = (1..=5).map(|n| all_posets(n).len()).collect();
        assert_eq!(counts, vec![1, 2, 5, 16, 63]);
    }

    #[test]
    fn point_set_text() {
        assert_eq!(
            "{1,2}".parse::<PointSet>().unwrap(),
            PointSet::from_points([1, 2])
        );
        assert_eq!(
            "1, 2".parse::<PointSet>().unwrap(),
            PointSet::from_points([1, 2])
        );
        assert_eq!("∅".parse::<PointSet>().unwrap(), PointSet::EMPTY);
        assert!("{a}".parse::<PointSet>().is_err());
        assert!("{64}".parse::<PointSet>().is_err());
    }

    #[test]
    fn word_tree_shape() {
        let (p, w) = FinitePoset::word_tree(2, 2, true);
        assert_eq!(p.len(), 7);
        assert_eq!(p.least_element(), Some(0));
        assert!(w[0].is_empty());
        let (q, _) = FinitePoset::word_tree(2, 2, false);
        assert_eq!(q.len(), 6);
        assert_eq!(q.least_element(), None);
    }
}
