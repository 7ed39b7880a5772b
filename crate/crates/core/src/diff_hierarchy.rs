//! Hausdorff difference codes and the brute-force level oracle.
//!
//! A code `(A_β)_{β<α}` denotes `D_α(A)`: a point belongs iff it lies in some
//! `A_β` and the least such `β` has parity opposite to `α`. Codes are sparse:
//! unlisted indices stand for the empty set.

use std::collections::HashSet;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::finite_space::{FinitePoset, PointSet};
use crate::ordinals::Ordinal;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DiffError {
    #[error("entry index {index} is not below alpha = {alpha}")]
    IndexTooLarge { index: Ordinal, alpha: Ordinal },
    #[error("entry indices must be strictly increasing (at {0})")]
    NotIncreasing(Ordinal),
    #[error("entry {index} is not open: {set}")]
    NotOpen { index: Ordinal, set: PointSet },
    #[error("pad target {target} is below alpha = {alpha}")]
    PadTooSmall { target: Ordinal, alpha: Ordinal },
    #[error("operation expects a {0:?}-code")]
    WrongPolarity(Polarity),
    #[error("search exceeded its budget of {0} states")]
    Budget(usize),
    #[error("malformed code JSON: {0}")]
    Json(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
pub enum Polarity {
    #[default]
    D,
    #[serde(rename = "coD")]
    CoD,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DiffEntry<S> {
    pub index: Ordinal,
    pub set: S,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawCode<S>", bound(deserialize = "S: Deserialize<'de>"))]
pub struct DiffCode<S> {
    alpha: Ordinal,
    #[serde(default)]
    polarity: Polarity,
    entries: Vec<DiffEntry<S>>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawCode<S> {
    alpha: Ordinal,
    #[serde(default)]
    polarity: Polarity,
    entries: Vec<DiffEntry<S>>,
}

impl<S> TryFrom<RawCode<S>> for DiffCode<S> {
    type Error = DiffError;
    fn try_from(r: RawCode<S>) -> Result<Self, DiffError> {
        DiffCode::new(r.alpha, r.entries, r.polarity)
    }
}

/// Set descriptions that can be joined (needed for monotone normalization).
pub trait Join: Clone {
    fn join(&self, other: &Self) -> Self;
}

impl Join for PointSet {
    fn join(&self, other: &Self) -> Self {
        self.union(*other)
    }
}

impl<S> DiffCode<S> {
    pub fn new(
        alpha: Ordinal,
        entries: Vec<DiffEntry<S>>,
        polarity: Polarity,
    ) -> Result<Self, DiffError> {
        for (k, e) in entries.iter().enumerate() {
            if e.index >= alpha {
                return Err(DiffError::IndexTooLarge {
                    index: e.index.clone(),
                    alpha,
                });
            }
            if k > 0 && entries[k - 1].index >= e.index {
                return Err(DiffError::NotIncreasing(e.index.clone()));
            }
        }
        Ok(DiffCode {
            alpha,
            entries,
            polarity,
        })
    }

    /// Code with entries at indices `0..sets.len()` and `alpha = sets.len()`.
    pub fn finite(sets: Vec<S>, polarity: Polarity) -> Self {
        let alpha = Ordinal::from_nat(sets.len() as u64);
        let entries = sets
            .into_iter()
            .enumerate()
            .map(|(i, set)| DiffEntry {
                index: Ordinal::from_nat(i as u64),
                set,
            })
            .collect();
        DiffCode {
            alpha,
            entries,
            polarity,
        }
    }

    pub fn alpha(&self) -> &Ordinal {
        &self.alpha
    }

    pub fn polarity(&self) -> Polarity {
        self.polarity
    }

    pub fn entries(&self) -> &[DiffEntry<S>] {
        &self.entries
    }

    /// Index of the least listed entry passing `member`.
    pub fn least_index<F: Fn(&S) -> bool>(&self, member: F) -> Option<&Ordinal> {
        self.entries
            .iter()
            .find(|e| member(&e.set))
            .map(|e| &e.index)
    }

    /// Membership given a decision procedure for "x ∈ set".
    pub fn eval_with<F: Fn(&S) -> bool>(&self, member: F) -> bool {
        let in_d = match self.least_index(member) {
            Some(beta) => !beta.same_parity(&self.alpha),
            None => false,
        };
        match self.polarity {
            Polarity::D => in_d,
            Polarity::CoD => !in_d,
        }
    }

    /// Same denotation at a larger `alpha`: indices shift by one when the
    /// parities of the two alphas differ.
    pub fn pad(&self, target: Ordinal) -> Result<Self, DiffError>
    where
        S: Clone,
    {
        if target < self.alpha {
            return Err(DiffError::PadTooSmall {
                target,
                alpha: self.alpha.clone(),
            });
        }
        let shift = !target.same_parity(&self.alpha);
        let entries = self
            .entries
            .iter()
            .map(|e| DiffEntry {
                index: if shift {
                    e.index.succ()
                } else {
                    e.index.clone()
                },
                set: e.set.clone(),
            })
            .collect();
        Ok(DiffCode {
            alpha: target,
            entries,
            polarity: self.polarity,
        })
    }

    /// Rewrites a coD-code as a D-code of level `alpha + 1` by appending the
    /// whole space at index `alpha`.
    pub fn embed_co(&self, whole: S) -> Result<Self, DiffError>
    where
        S: Clone,
    {
        if self.polarity != Polarity::CoD {
            return Err(DiffError::WrongPolarity(Polarity::CoD));
        }
        let mut entries = self.entries.clone();
        entries.push(DiffEntry {
            index: self.alpha.clone(),
            set: whole,
        });
        Ok(DiffCode {
            alpha: self.alpha.succ(),
            entries,
            polarity: Polarity::D,
        })
    }

    pub fn map_sets<T, F: Fn(&S) -> T>(&self, f: F) -> DiffCode<T> {
        DiffCode {
            alpha: self.alpha.clone(),
            polarity: self.polarity,
            entries: self
                .entries
                .iter()
                .map(|e| DiffEntry {
                    index: e.index.clone(),
                    set: f(&e.set),
                })
                .collect(),
        }
    }
}

impl<S: Join> DiffCode<S> {
    /// Replaces each entry by the union of all entries up to it.
    pub fn normalize_monotone(&self) -> Self {
        let mut acc: Option<S> = None;
        let entries = self
            .entries
            .iter()
            .map(|e| {
                let s = match &acc {
                    Some(a) => a.join(&e.set),
                    None => e.set.clone(),
                };
                acc = Some(s.clone());
                DiffEntry {
                    index: e.index.clone(),
                    set: s,
                }
            })
            .collect();
        DiffCode {
            alpha: self.alpha.clone(),
            entries,
            polarity: self.polarity,
        }
    }
}

impl DiffCode<PointSet> {
    pub fn eval_at(&self, x: usize) -> bool {
        self.eval_with(|s| s.contains(x))
    }

    pub fn denotation(&self, carrier: PointSet) -> PointSet {
        PointSet::from_points(carrier.iter().filter(|&x| self.eval_at(x)))
    }

    pub fn check_open(&self, p: &FinitePoset) -> Result<(), DiffError> {
        for e in &self.entries {
            if !p.is_open(e.set) {
                return Err(DiffError::NotOpen {
                    index: e.index.clone(),
                    set: e.set,
                });
            }
        }
        Ok(())
    }

    pub fn from_json(s: &str) -> Result<Self, DiffError> {
        serde_json::from_str(s).map_err(|e| DiffError::Json(e.to_string()))
    }
}

/// Σ- and Π-levels of a set: the least `n` with `a ∈ D_n`, resp. `a ∈ co-D_n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Levels {
    pub sigma: usize,
    pub pi: usize,
}

/// Default cap on visited search states for [`level_bruteforce`].
pub const DEFAULT_STATE_BUDGET: usize = 2_000_000;

/// Exhaustive level computation: searches increasing chains of opens.
/// Returns the levels together with witness codes for both sides.
pub fn level_bruteforce(
    p: &FinitePoset,
    a: PointSet,
    budget: usize,
) -> Result<(Levels, DiffCode<PointSet>, DiffCode<PointSet>), DiffError> {
    let opens = p.opens();
    let carrier = p.carrier();
    let a = a.intersection(carrier);
    let mut spent = 0usize;
    let (sigma, sc) = least_level(&opens, a, p.len() + 1, budget, &mut spent)?;
    let (pi, pc) = least_level(
        &opens,
        a.complement_in(carrier),
        p.len() + 1,
        budget,
        &mut spent,
    )?;
    let pc = DiffCode {
        polarity: Polarity::CoD,
        ..pc
    };
    Ok((Levels { sigma, pi }, sc, pc))
}

fn least_level(
    opens: &[PointSet],
    a: PointSet,
    max_n: usize,
    budget: usize,
    spent: &mut usize,
) -> Result<(usize, DiffCode<PointSet>), DiffError> {
    for n in 0..=max_n {
        let mut seen = HashSet::new();
        let mut chain = Vec::new();
        if chain_search(
            opens,
            a,
            n,
            PointSet::EMPTY,
            &mut chain,
            &mut seen,
            budget,
            spent,
        )? {
            return Ok((n, DiffCode::finite(chain, Polarity::D)));
        }
    }
    unreachable!("every subset of a finite poset is in D_(n+1)")
}

#[allow(clippy::too_many_arguments)]
fn chain_search(
    opens: &[PointSet],
    a: PointSet,
    n: usize,
    prev: PointSet,
    chain: &mut Vec<PointSet>,
    seen: &mut HashSet<(usize, PointSet)>,
    budget: usize,
    spent: &mut usize,
) -> Result<bool, DiffError> {
    let i = chain.len();
    if i == n {
        return Ok(a.is_subset(prev));
    }
    if !seen.insert((i, prev)) {
        return Ok(false);
    }
    *spent += 1;
    if *spent > budget {
        return Err(DiffError::Budget(budget));
    }
    // slice i lies inside `a` exactly when i and n have opposite parity
    let inside = (i % 2) != (n % 2);
    for &u in opens {
        if !prev.is_subset(u) {
            continue;
        }
        let slice = u.difference(prev);
        let ok = if inside {
            slice.is_subset(a)
        } else {
            slice.intersection(a).is_empty()
        };
        if !ok {
            continue;
        }
        chain.push(u);
        if chain_search(opens, a, n, u, chain, seen, budget, spent)? {
            return Ok(true);
        }
        chain.pop();
    }
    Ok(false)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn o(s: &str) -> Ordinal {
        s.parse().unwrap()
    }

    #[test]
    fn least_index_parity_rule() {
        // D_2(A_0, A_1) = A_1 \ A_0
        let c = DiffCode::finite(
            vec![PointSet::from_points([2]), PointSet::from_points([1, 2])],
            Polarity::D,
        );
        assert_eq!(c.denotation(PointSet::full(3)), PointSet::from_points([1]));
        let co = DiffCode {
            polarity: Polarity::CoD,
            ..c.clone()
        };
        assert_eq!(
            co.denotation(PointSet::full(3)),
            PointSet::from_points([0, 2])
        );
    }

    #[test]
    fn alpha_zero_is_empty() {
        let c: DiffCode<PointSet> = DiffCode::finite(vec![], Polarity::D);
        assert_eq!(c.denotation(PointSet::full(4)), PointSet::EMPTY);
    }

    #[test]
    fn validation() {
        let e = |i: &str| DiffEntry {
            index: o(i),
            set: PointSet::EMPTY,
        };
        assert!(DiffCode::new(o("2"), vec![e("0"), e("2")], Polarity::D).is_err());
        assert!(DiffCode::new(o("w"), vec![e("3"), e("1")], Polarity::D).is_err());
        assert!(DiffCode::new(o("w + 1"), vec![e("3"), e("w")], Polarity::D).is_ok());
    }

    #[test]
    fn pad_keeps_denotation() {
        let c = DiffCode::finite(
            vec![PointSet::from_points([2]), PointSet::from_points([1, 2])],
            Polarity::D,
        );
        let full = PointSet::full(3);
        for t in ["2", "3", "w", "w + 1", "w*2 + 5"] {
            assert_eq!(
                c.pad(o(t)).unwrap().denotation(full),
                c.denotation(full),
                "{t}"
            );
        }
        assert!(c.pad(o("1")).is_err());
    }

    #[test]
    fn embed_co_keeps_denotation() {
        let c = DiffCode::finite(
            vec![PointSet::from_points([2]), PointSet::from_points([1, 2])],
            Polarity::CoD,
        );
        let full = PointSet::full(3);
        let d = c.embed_co(full).unwrap();
        assert_eq!(d.polarity(), Polarity::D);
        assert_eq!(d.alpha(), &o("3"));
        assert_eq!(d.denotation(full), c.denotation(full));
        assert!(d.embed_co(full).is_err());
    }

    #[test]
    fn brute_force_on_three_chain() {
        let c = FinitePoset::chain(3);
        let lv = |s: &[usize]| {
            level_bruteforce(
                &c,
                PointSet::from_points(s.iter().copied()),
                DEFAULT_STATE_BUDGET,
            )
            .unwrap()
            .0
        };
        assert_eq!(lv(&[1]), Levels { sigma: 2, pi: 3 });
        assert_eq!(lv(&[]), Levels { sigma: 0, pi: 1 });
        assert_eq!(lv(&[0, 1, 2]), Levels { sigma: 1, pi: 0 });
        assert_eq!(lv(&[2]), Levels { sigma: 1, pi: 2 });
    }

    #[test]
    fn witnesses_denote_the_set() {
        let c = FinitePoset::chain(4);
        for bits in 0..16u64 {
            let a = PointSet(bits);
            let (_, s, p) = level_bruteforce(&c, a, DEFAULT_STATE_BUDGET).unwrap();
            s.check_open(&c).unwrap();
            assert_eq!(s.denotation(c.carrier()), a);
            assert_eq!(p.denotation(c.carrier()), a);
        }
    }

    #[test]
    fn json_roundtrip() {
        let c = DiffCode::new(
            o("w + 1"),
            vec![DiffEntry {
                index: o("3"),
                set: PointSet::from_points([1]),
            }],
            Polarity::CoD,
        )
        .unwrap();
        let s = serde_json::to_string(&c).unwrap();
        assert_eq!(DiffCode::<PointSet>::from_json(&s).unwrap(), c);
        assert!(DiffCode::<PointSet>::from_json(
            r#"{"alpha":"1","entries":[{"index":"1","set":[]}]}"#
        )
        .is_err());
    }
}
