//! Cylinder spaces `k^ω`. Basic opens are finite unions of cylinders `[w]`,
//! kept in a canonical form: maximal words only, complete sibling families
//! merged into their parent, sorted shortlex.

use std::cmp::Ordering;
use std::collections::BTreeSet;
use std::fmt;

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{check_chain, verify_in_all, ModelError, MoveSampler, SpaceModel, UnionClosed};

pub type Word = Vec<u8>;

fn shortlex(a: &Word, b: &Word) -> Ordering {
    a.len().cmp(&b.len()).then_with(|| a.cmp(b))
}

fn is_prefix(p: &[u8], w: &[u8]) -> bool {
    p.len() <= w.len() && &w[..p.len()] == p
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Clopen {
    words: Vec<Word>,
}

impl Clopen {
    pub fn empty() -> Self {
        Clopen { words: Vec::new() }
    }

    pub fn whole() -> Self {
        Clopen {
            words: vec![Vec::new()],
        }
    }

    pub fn cylinder(w: Word) -> Self {
        Clopen { words: vec![w] }
    }

    pub fn from_words(words: Vec<Word>, k: u8) -> Self {
        let mut set: BTreeSet<Word> = words.into_iter().collect();
        loop {
            // drop words below another word
            let snapshot: Vec<Word> = set.iter().cloned().collect();
            set.retain(|w| !(0..w.len()).any(|l| snapshot.binary_search(&w[..l].to_vec()).is_ok()));
            let mut merged = None;
            for w in &set {
                if w.is_empty() {
                    continue;
                }
                let parent = &w[..w.len() - 1];
                if (0..k).all(|c| {
                    let mut s = parent.to_vec();
                    s.push(c);
                    set.contains(&s)
                }) {
                    merged = Some(parent.to_vec());
                    break;
                }
            }
            match merged {
                Some(p) => {
                    set.retain(|w| !(w.len() == p.len() + 1 && is_prefix(&p, w)));
                    set.insert(p);
                }
                None => break,
            }
        }
        let mut words: Vec<Word> = set.into_iter().collect();
        words.sort_by(shortlex);
        Clopen { words }
    }

    /// Canonical form of deserialized data, rejecting symbols outside the
    /// alphabet.
    pub fn canonical(&self, k: u8) -> Result<Clopen, ModelError> {
        if let Some(w) = self.words.iter().find(|w| w.iter().any(|&c| c >= k)) {
            return Err(ModelError::Invalid(format!(
                "word {w:?} uses a symbol outside 0..{k}"
            )));
        }
        Ok(Clopen::from_words(self.words.clone(), k))
    }

    pub fn words(&self) -> &[Word] {
        &self.words
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    /// Length of the shortest word (`usize::MAX` for the empty set).
    pub fn min_len(&self) -> usize {
        self.words.iter().map(Vec::len).min().unwrap_or(usize::MAX)
    }

    pub fn depth(&self) -> usize {
        self.words.iter().map(Vec::len).max().unwrap_or(0)
    }

    pub fn covers_word(&self, w: &[u8]) -> bool {
        self.words.iter().any(|p| is_prefix(p, w))
    }

    /// `self ⊆ other`, valid because `other` is canonical.
    pub fn is_subset_of(&self, other: &Clopen) -> bool {
        self.words.iter().all(|w| other.covers_word(w))
    }

    pub fn union(&self, other: &Clopen, k: u8) -> Clopen {
        Clopen::from_words(self.words.iter().chain(&other.words).cloned().collect(), k)
    }

    pub fn intersection(&self, other: &Clopen, k: u8) -> Clopen {
        let mut out = Vec::new();
        for u in &self.words {
            for v in &other.words {
                if is_prefix(u, v) {
                    out.push(v.clone());
                } else if is_prefix(v, u) {
                    out.push(u.clone());
                }
            }
        }
        Clopen::from_words(out, k)
    }

    pub fn complement(&self, k: u8) -> Clopen {
        let d = self.depth();
        let out = all_words(k, d)
            .into_iter()
            .filter(|w| !self.covers_word(w))
            .collect();
        Clopen::from_words(out, k)
    }

    pub fn contains_point(&self, x: &CylPoint) -> bool {
        self.words.iter().any(|w| x.starts_with(w))
    }
}

impl fmt::Display for Clopen {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.words.is_empty() {
            return write!(f, "∅");
        }
        let parts: Vec<String> = self
            .words
            .iter()
            .map(|w| format!("[{}]", word_str(w)))
            .collect();
        write!(f, "{}", parts.join("∪"))
    }
}

fn word_str(w: &[u8]) -> String {
    w.iter().map(|c| char::from(b'0' + c)).collect()
}

/// All words of length `n`, in lexicographic order.
pub fn all_words(k: u8, n: usize) -> Vec<Word> {
    let mut out = vec![Vec::new()];
    for _ in 0..n {
        out = out
            .into_iter()
            .flat_map(|w| {
                (0..k).map(move |c| {
                    let mut v = w.clone();
                    v.push(c);
                    v
                })
            })
            .collect();
    }
    out
}

/// The word of the given shortlex rank.
pub fn word_of_rank(k: u8, mut r: u64) -> Word {
    let k64 = k as u64;
    let mut len = 0;
    let mut level = 1u64;
    while r >= level {
        r -= level;
        level = level.saturating_mul(k64);
        len += 1;
    }
    let mut w = vec![0u8; len];
    for i in (0..len).rev() {
        w[i] = (r % k64) as u8;
        r /= k64;
    }
    w
}

pub fn rank_of_word(k: u8, w: &[u8]) -> Option<u64> {
    let k64 = k as u64;
    let mut offset = 0u64;
    let mut level = 1u64;
    for _ in 0..w.len() {
        offset = offset.checked_add(level)?;
        level = level.checked_mul(k64)?;
    }
    let mut v = 0u64;
    for &c in w {
        v = v.checked_mul(k64)?.checked_add(c as u64)?;
    }
    offset.checked_add(v)
}

/// An eventually periodic sequence `prefix · period^ω`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CylPoint {
    pub prefix: Word,
    pub period: Word,
}

impl CylPoint {
    pub fn new(prefix: Word, period: Word) -> Result<Self, ModelError> {
        if period.is_empty() {
            return Err(ModelError::Invalid("empty period".into()));
        }
        Ok(CylPoint { prefix, period })
    }

    pub fn symbol(&self, i: usize) -> u8 {
        if i < self.prefix.len() {
            self.prefix[i]
        } else {
            self.period[(i - self.prefix.len()) % self.period.len()]
        }
    }

    pub fn first(&self, n: usize) -> Word {
        (0..n).map(|i| self.symbol(i)).collect()
    }

    pub fn starts_with(&self, w: &[u8]) -> bool {
        w.iter().enumerate().all(|(i, &c)| self.symbol(i) == c)
    }

    /// Description size: the number of stored symbols.
    pub fn size(&self) -> usize {
        self.prefix.len() + self.period.len()
    }

    pub fn max_symbol(&self) -> u8 {
        self.prefix
            .iter()
            .chain(&self.period)
            .copied()
            .max()
            .unwrap_or(0)
    }
}

impl fmt::Display for CylPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}({})^ω",
            word_str(&self.prefix),
            word_str(&self.period)
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CylRelation {
    /// `U ≪ V ⟺ ∅ ≠ V ⊆ U`
    Containment,
    /// `∅ ≠ V ⊆ U` and the shortest word of `V` is longer than that of `U`,
    /// so diameters shrink along chains.
    Polish,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CylinderModel {
    pub alphabet: u8,
    pub relation: CylRelation,
}

impl CylinderModel {
    pub fn new(alphabet: u8, relation: CylRelation) -> Result<Self, ModelError> {
        if !(2..=16).contains(&alphabet) {
            return Err(ModelError::Invalid(format!(
                "alphabet size {alphabet} outside 2..=16"
            )));
        }
        Ok(CylinderModel { alphabet, relation })
    }

    /// Basis index of a clopen: `2r` for the cylinder of shortlex rank `r`,
    /// `2(m-1)+1` for the union coded by bitmask `m` over ranks.
    pub fn index_of(&self, u: &Clopen) -> Option<usize> {
        if let [w] = u.words() {
            return rank_of_word(self.alphabet, w)
                .and_then(|r| usize::try_from(r.checked_mul(2)?).ok());
        }
        let mut mask = 0u64;
        for w in u.words() {
            let r = rank_of_word(self.alphabet, w)?;
            if r >= 62 {
                return None;
            }
            mask |= 1 << r;
        }
        if mask == 0 {
            // the empty union has no code
            return None;
        }
        usize::try_from(2 * (mask - 1) + 1).ok()
    }

    pub fn valid_point(&self, x: &CylPoint) -> bool {
        !x.period.is_empty() && x.max_symbol() < self.alphabet
    }

    /// The least index cylinder around `x` inside `u` of length at least
    /// `min_len`, which is also the least basis element with that property.
    fn least_prefix(&self, x: &CylPoint, u: &Clopen, min_len: usize) -> Result<Clopen, ModelError> {
        let w = u
            .words()
            .iter()
            .find(|w| x.starts_with(w))
            .ok_or(ModelError::NotInOpen)?;
        Ok(Clopen::cylinder(x.first(w.len().max(min_len))))
    }
}

impl SpaceModel for CylinderModel {
    type Open = Clopen;
    type Point = CylPoint;

    fn name(&self) -> &'static str {
        "cylinder"
    }

    fn basis(&self, n: usize) -> Option<Clopen> {
        let k = self.alphabet;
        if n.is_multiple_of(2) {
            Some(Clopen::cylinder(word_of_rank(k, (n / 2) as u64)))
        } else {
            let mask = ((n - 1) / 2 + 1) as u64;
            let words = (0..64)
                .filter(|i| mask >> i & 1 == 1)
                .map(|i| word_of_rank(k, i))
                .collect();
            Some(Clopen::from_words(words, k))
        }
    }

    fn contains(&self, u: &Clopen, x: &CylPoint) -> bool {
        u.contains_point(x)
    }

    fn is_subset(&self, u: &Clopen, v: &Clopen) -> bool {
        u.is_subset_of(v)
    }

    fn approx(&self, u: &Clopen, v: &Clopen) -> bool {
        let base = !v.is_empty() && v.is_subset_of(u);
        match self.relation {
            CylRelation::Containment => base,
            CylRelation::Polish => base && v.min_len() > u.min_len(),
        }
    }

    fn approx_at(&self, t: usize, u: &Clopen, v: &Clopen) -> bool {
        u.depth() <= t && v.depth() <= t && self.approx(u, v)
    }

    fn sample_point(&self, u: &Clopen) -> Option<CylPoint> {
        u.words().first().map(|w| CylPoint {
            prefix: w.clone(),
            period: vec![0],
        })
    }

    fn least_inside(&self, x: &CylPoint, u: &Clopen, _bound: usize) -> Result<Clopen, ModelError> {
        self.least_prefix(x, u, 0)
    }

    fn least_successor(
        &self,
        c: &Clopen,
        x: &CylPoint,
        _bound: usize,
    ) -> Result<Clopen, ModelError> {
        let min = match self.relation {
            CylRelation::Containment => 0,
            CylRelation::Polish => c.min_len().saturating_add(1),
        };
        self.least_prefix(x, c, min)
    }

    /// A single cylinder has a smaller index than any union containing it,
    /// so the answer is the shortlex-least admissible word.
    fn least_approx(&self, u: &Clopen, _bound: usize) -> Result<Clopen, ModelError> {
        if u.is_empty() {
            return Err(ModelError::EmptyChain);
        }
        let w = match self.relation {
            CylRelation::Containment => u.words()[0].clone(),
            CylRelation::Polish => {
                let len = u.min_len() + 1;
                u.words()
                    .iter()
                    .filter(|w| w.len() <= len)
                    .map(|w| {
                        let mut v = w.clone();
                        v.resize(len, 0);
                        v
                    })
                    .min()
                    .expect("the shortest word qualifies")
            }
        };
        Ok(Clopen::cylinder(w))
    }

    /// The leftmost path through the last member.
    fn limit_point(&self, chain: &[Clopen]) -> Result<CylPoint, ModelError> {
        check_chain(self, chain)?;
        let x = self
            .sample_point(chain.last().unwrap())
            .ok_or(ModelError::EmptyChain)?;
        verify_in_all(self, chain, &x)?;
        Ok(x)
    }
}

impl UnionClosed for CylinderModel {
    fn union(&self, parts: &[Clopen]) -> Option<Clopen> {
        Some(Clopen::from_words(
            parts
                .iter()
                .flat_map(|p| p.words().iter().cloned())
                .collect(),
            self.alphabet,
        ))
    }
}

impl MoveSampler for CylinderModel {
    fn random_move<R: Rng>(
        &self,
        rng: &mut R,
        within: Option<&Clopen>,
    ) -> Option<(CylPoint, Clopen)> {
        let k = self.alphabet;
        let whole = Clopen::whole();
        let within = within.unwrap_or(&whole);
        let base = within
            .words()
            .get(rng.gen_range(0..within.words().len().max(1)))?
            .clone();
        let mut prefix = base.clone();
        for _ in 0..rng.gen_range(0..4) {
            prefix.push(rng.gen_range(0..k));
        }
        let period: Word = (0..rng.gen_range(1..4))
            .map(|_| rng.gen_range(0..k))
            .collect();
        let x = CylPoint { prefix, period };
        let len = base.len() + rng.gen_range(0..4);
        let mut u = Clopen::cylinder(x.first(len));
        if rng.gen_bool(0.3) {
            // add a second cylinder somewhere inside `within`
            let other = within.words()[rng.gen_range(0..within.words().len())].clone();
            let mut w = other;
            w.push(rng.gen_range(0..k));
            u = u.union(&Clopen::cylinder(w), k);
        }
        Some((x, u))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::space_models::linear_least;

    fn m2(rel: CylRelation) -> CylinderModel {
        CylinderModel::new(2, rel).unwrap()
    }

    #[test]
    fn ranks_roundtrip() {
        for k in 2..4u8 {
            for r in 0..500u64 {
                assert_eq!(rank_of_word(k, &word_of_rank(k, r)), Some(r));
            }
        }
        assert_eq!(word_of_rank(2, 0), Vec::<u8>::new());
        assert_eq!(word_of_rank(2, 3), vec![0, 0]);
    }

    #[test]
    fn canonical_form_merges_siblings() {
        let c = Clopen::from_words(vec![vec![0, 0], vec![0, 1], vec![1, 0, 1]], 2);
        assert_eq!(c.words(), &[vec![0], vec![1, 0, 1]]);
        let all = Clopen::from_words(vec![vec![0], vec![1, 1], vec![1, 0]], 2);
        assert_eq!(all, Clopen::whole());
        assert_eq!(
            Clopen::from_words(vec![vec![0], vec![0, 1]], 2).words(),
            &[vec![0]]
        );
    }

    #[test]
    fn boolean_operations_agree_on_words() {
        let k = 2;
        let m = m2(CylRelation::Containment);
        let words = all_words(k, 5);
        for a in 1..60 {
            for b in 1..60 {
                let (u, v) = (m.basis(a).unwrap(), m.basis(b).unwrap());
                let i = u.intersection(&v, k);
                let un = u.union(&v, k);
                let c = u.complement(k);
                for w in &words {
                    assert_eq!(i.covers_word(w), u.covers_word(w) && v.covers_word(w));
                    assert_eq!(un.covers_word(w), u.covers_word(w) || v.covers_word(w));
                    assert_eq!(c.covers_word(w), !u.covers_word(w));
                }
                let sub = words.iter().all(|w| !u.covers_word(w) || v.covers_word(w));
                assert_eq!(u.is_subset_of(&v), sub, "{u} {v}");
            }
        }
    }

    #[test]
    fn index_roundtrip() {
        let m = CylinderModel::new(3, CylRelation::Containment).unwrap();
        for n in 0..400 {
            let u = m.basis(n).unwrap();
            let i = m.index_of(&u).unwrap();
            assert_eq!(m.basis(i).unwrap(), u);
            assert!(i <= n);
        }
    }

    #[test]
    fn least_searches_match_linear_scan() {
        for rel in [CylRelation::Containment, CylRelation::Polish] {
            let m = m2(rel);
            let points = [
                CylPoint::new(vec![0, 1], vec![1]).unwrap(),
                CylPoint::new(vec![1], vec![0, 1]).unwrap(),
                CylPoint::new(vec![], vec![0]).unwrap(),
            ];
            for x in &points {
                for n in 0..40 {
                    let u = m.basis(n).unwrap();
                    if !u.contains_point(x) {
                        continue;
                    }
                    let fast = m.least_inside(x, &u, 0).unwrap();
                    let slow =
                        linear_least(&m, 1 << 12, |c| m.contains(c, x) && m.is_subset(c, &u))
                            .unwrap();
                    assert_eq!(fast, slow);
                    let fast = m.least_approx(&u, 0).unwrap();
                    let slow =
                        linear_least(&m, 1 << 12, |c| !c.is_empty() && m.approx(&u, c)).unwrap();
                    assert_eq!(fast, slow);
                    let fast = m.least_successor(&u, x, 0).unwrap();
                    let slow =
                        linear_least(&m, 1 << 12, |c| m.contains(c, x) && m.approx(&u, c)).unwrap();
                    assert_eq!(fast, slow, "{rel:?} {x} {u}");
                }
            }
        }
    }

    #[test]
    fn points_and_limits() {
        let m = m2(CylRelation::Polish);
        let x = CylPoint::new(vec![0], vec![1, 0]).unwrap();
        assert_eq!(x.first(5), vec![0, 1, 0, 1, 0]);
        let chain = vec![
            Clopen::whole(),
            Clopen::cylinder(vec![0]),
            Clopen::cylinder(vec![0, 1]),
        ];
        let y = m.limit_point(&chain).unwrap();
        assert!(chain.iter().all(|c| c.contains_point(&y)));
        let bad = vec![Clopen::cylinder(vec![0]), Clopen::cylinder(vec![0])];
        assert_eq!(m.limit_point(&bad), Err(ModelError::ChainBroken(1)));
        assert!(m2(CylRelation::Containment).limit_point(&bad).is_ok());
    }
}
