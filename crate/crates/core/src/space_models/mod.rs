//! Symbolic space models: a basis enumeration, decidable membership for
//! finitely described points, decidable containment of basic opens and a
//! staged approximation relation.

use std::fmt::Debug;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub mod axioms;
pub mod baire;
pub mod clauses;
pub mod cylinder;
pub mod finite;
pub mod lift;
pub mod powerset;
pub mod spec;

pub use clauses::{ClauseModel, ClauseRow, ClauseStatus, ClauseSystem, NU};
pub use cylinder::{Clopen, CylPoint, CylRelation, CylinderModel};
pub use finite::{FiniteBasis, FinitePosetModel, FiniteRelation};
pub use powerset::{FinSet, PInfinityModel, PowersetModel, SymbolicSet};

#[derive(Debug, Error, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum ModelError {
    #[error("chain is not ≪-increasing at step {0}")]
    ChainBroken(usize),
    #[error("clause {0} is violated by the limit point")]
    ClauseViolated(usize),
    #[error("point is not in the open")]
    NotInOpen,
    #[error("point fails clause {0}")]
    PointFailsClause(usize),
    #[error("search exhausted after {0} basis elements")]
    SearchExhausted(usize),
    #[error("limit point misses chain member {0}")]
    LimitMisses(usize),
    #[error("empty chain")]
    EmptyChain,
    #[error("{0}")]
    Invalid(String),
}

/// Default number of basis elements examined by the generic least-searches.
pub const DEFAULT_SEARCH_BOUND: usize = 1 << 14;

pub trait SpaceModel {
    type Open: Clone + Debug + PartialEq + Serialize;
    type Point: Clone + Debug + PartialEq + Serialize;

    fn name(&self) -> &'static str;

    /// `O_n`, or `None` past the end of a finite basis.
    fn basis(&self, n: usize) -> Option<Self::Open>;

    fn basis_len(&self) -> Option<usize> {
        None
    }

    fn contains(&self, u: &Self::Open, x: &Self::Point) -> bool;

    /// `U ⊆ V`
    fn is_subset(&self, u: &Self::Open, v: &Self::Open) -> bool;

    /// `U ≪ V`
    fn approx(&self, u: &Self::Open, v: &Self::Open) -> bool;

    /// Stage-`t` approximation `R^(t)` of `≪`; monotone in `t`.
    fn approx_at(&self, _t: usize, u: &Self::Open, v: &Self::Open) -> bool {
        self.approx(u, v)
    }

    /// Some point of `u`, if it is nonempty.
    fn sample_point(&self, u: &Self::Open) -> Option<Self::Point>;

    fn is_finite(&self) -> bool {
        false
    }

    /// Least basis element `C` with `x ∈ C ⊆ U`.
    fn least_inside(
        &self,
        x: &Self::Point,
        u: &Self::Open,
        bound: usize,
    ) -> Result<Self::Open, ModelError> {
        linear_least(self, bound, |c| self.contains(c, x) && self.is_subset(c, u))
    }

    /// Least basis element `B` with `C ≪ B` and `x ∈ B`.
    fn least_successor(
        &self,
        c: &Self::Open,
        x: &Self::Point,
        bound: usize,
    ) -> Result<Self::Open, ModelError> {
        linear_least(self, bound, |b| self.contains(b, x) && self.approx(c, b))
    }

    /// Least nonempty basis element `W` with `U ≪ W`.
    fn least_approx(&self, u: &Self::Open, bound: usize) -> Result<Self::Open, ModelError> {
        linear_least(self, bound, |w| {
            self.approx(u, w) && self.sample_point(w).is_some()
        })
    }

    /// A point in every member of a `≪`-increasing chain.
    fn limit_point(&self, chain: &[Self::Open]) -> Result<Self::Point, ModelError> {
        check_chain(self, chain)?;
        let x = self
            .sample_point(chain.last().unwrap())
            .ok_or(ModelError::EmptyChain)?;
        verify_in_all(self, chain, &x)?;
        Ok(x)
    }
}

/// Models whose basis is closed under finite unions (the coder `λ`).
pub trait UnionClosed: SpaceModel {
    fn union(&self, parts: &[Self::Open]) -> Option<Self::Open>;
}

/// Models with a random generator of legal Empty moves.
pub trait MoveSampler: SpaceModel {
    /// A random point of `within` (or of the space) and a basic open around
    /// it inside `within`.
    fn random_move<R: rand::Rng>(
        &self,
        rng: &mut R,
        within: Option<&Self::Open>,
    ) -> Option<(Self::Point, Self::Open)>;
}

pub fn linear_least<M: SpaceModel + ?Sized, F: Fn(&M::Open) -> bool>(
    m: &M,
    bound: usize,
    pred: F,
) -> Result<M::Open, ModelError> {
    let lim = m.basis_len().map_or(bound, |l| l.min(bound));
    for n in 0..lim {
        if let Some(o) = m.basis(n) {
            if pred(&o) {
                return Ok(o);
            }
        }
    }
    Err(ModelError::SearchExhausted(lim))
}

pub fn check_chain<M: SpaceModel + ?Sized>(m: &M, chain: &[M::Open]) -> Result<(), ModelError> {
    if chain.is_empty() {
        return Err(ModelError::EmptyChain);
    }
    for (k, w) in chain.windows(2).enumerate() {
        if !m.approx(&w[0], &w[1]) {
            return Err(ModelError::ChainBroken(k + 1));
        }
    }
    Ok(())
}

pub fn verify_in_all<M: SpaceModel + ?Sized>(
    m: &M,
    chain: &[M::Open],
    x: &M::Point,
) -> Result<(), ModelError> {
    match chain.iter().position(|u| !m.contains(u, x)) {
        Some(i) => Err(ModelError::LimitMisses(i)),
        None => Ok(()),
    }
}

/// Three-valued answer for bounded searches.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Tri {
    True,
    False,
    Unknown,
}
