//! Residue chains: the alternating closure construction that yields a
//! Hausdorff code for a Δ⁰₂ subset of a finite poset.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::diff_hierarchy::{DiffCode, DiffEntry, Levels, Polarity};
use crate::finite_space::{FinitePoset, PointSet};
use crate::ordinals::Ordinal;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ResidueError {
    #[error("residue chain stabilizes at a nonempty set {0}; the set is not Δ⁰₂")]
    NotDelta02(PointSet),
}

/// `F_0 = E`, `F_{2k+1} = cl(a ∩ F_{2k})`, `F_{2k+2} = cl(aᶜ ∩ F_{2k+1})`,
/// listed up to and including `F_theta`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ResidueChain {
    pub sets: Vec<PointSet>,
    pub theta: usize,
}

impl ResidueChain {
    pub fn last(&self) -> PointSet {
        self.sets[self.theta]
    }
}

pub fn residue_sequence(p: &FinitePoset, a: PointSet) -> ResidueChain {
    let carrier = p.carrier();
    let a = a.intersection(carrier);
    let ac = a.complement_in(carrier);
    let mut sets = vec![carrier];
    // the chain is constant once three consecutive sets agree
    loop {
        let k = sets.len();
        if k >= 3 && sets[k - 1] == sets[k - 2] && sets[k - 2] == sets[k - 3] {
            break;
        }
        let prev = sets[k - 1];
        let side = if k % 2 == 1 { a } else { ac };
        sets.push(p.closure(side.intersection(prev)));
    }
    let fin = *sets.last().unwrap();
    let start = sets.iter().position(|&s| s == fin).unwrap();
    let theta = start + start % 2;
    sets.truncate(theta + 1);
    while sets.len() < theta + 1 {
        sets.push(fin);
    }
    ResidueChain { sets, theta }
}

/// Hausdorff decomposition from residues: the raw code of level `theta + 1`
/// and a trimmed code whose level is reported as `sigma`. The trimmed code
/// is the shorter of the ones read off the residue chains of `a` and of its
/// complement.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Decomposition {
    pub chain: ResidueChain,
    pub raw: DiffCode<PointSet>,
    pub trimmed: DiffCode<PointSet>,
}

pub fn hausdorff_decompose(p: &FinitePoset, a: PointSet) -> Result<Decomposition, ResidueError> {
    let chain = residue_sequence(p, a);
    if !chain.last().is_empty() {
        return Err(ResidueError::NotDelta02(chain.last()));
    }
    let carrier = p.carrier();
    let entries: Vec<DiffEntry<PointSet>> = chain
        .sets
        .iter()
        .enumerate()
        .map(|(i, f)| DiffEntry {
            index: Ordinal::from_nat(i as u64),
            set: carrier.difference(*f),
        })
        .collect();
    let raw = DiffCode::new(
        Ordinal::from_nat(chain.theta as u64 + 1),
        entries,
        Polarity::D,
    )
    .expect("indices are increasing and below theta + 1");
    let a = a.intersection(carrier);
    let own = trim(p, a, &chain);
    let other = trim(p, a, &residue_sequence(p, a.complement_in(carrier)));
    let trimmed = if other.entries().len() < own.entries().len() {
        other
    } else {
        own
    };
    Ok(Decomposition {
        chain,
        raw,
        trimmed,
    })
}

/// Slices `F_{i} \ F_{i+1}` of any residue chain (each lies inside or
/// outside `a`) with empties dropped, trailing outside slices
/// dropped and equal-sign neighbours merged; the cumulative unions form a
/// monotone code, padded by one empty entry when the parities disagree.
fn trim(p: &FinitePoset, a: PointSet, chain: &ResidueChain) -> DiffCode<PointSet> {
    let mut slices: Vec<(PointSet, bool)> = Vec::new();
    for w in chain.sets.windows(2) {
        let s = w[0].difference(w[1]);
        if s.is_empty() {
            continue;
        }
        let inside = s.is_subset(a);
        debug_assert!(inside || s.intersection(a).is_empty());
        match slices.last_mut() {
            Some(last) if last.1 == inside => last.0 = last.0.union(s),
            _ => slices.push((s, inside)),
        }
    }
    while slices.last().is_some_and(|s| !s.1) {
        slices.pop();
    }
    let mut sets = Vec::new();
    // slice 0 must be inside `a` exactly when the level is odd
    if slices
        .first()
        .is_some_and(|s| s.1 != (slices.len() % 2 == 1))
    {
        sets.push(PointSet::EMPTY);
    }
    let mut acc = PointSet::EMPTY;
    for (s, _) in &slices {
        acc = acc.union(*s);
        sets.push(acc);
    }
    let code = DiffCode::finite(sets, Polarity::D);
    debug_assert!(code.check_open(p).is_ok());
    code
}

/// Levels read off the trimmed residue codes of `a` and its complement.
pub fn residue_levels(p: &FinitePoset, a: PointSet) -> Result<Levels, ResidueError> {
    let s = hausdorff_decompose(p, a)?;
    let c = hausdorff_decompose(p, a.complement_in(p.carrier()))?;
    // Hausdorff decomposition of the complement witnesses the co-D side
    Ok(Levels {
        sigma: s.trimmed.alpha().as_nat().unwrap() as usize,
        pi: c.trimmed.alpha().as_nat().unwrap() as usize,
    })
}
