//! Banach–Mazur and Choquet games over space models, and the passage
//! between stationary Nonempty strategies and approximation relations.

use std::collections::BTreeSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::finite_space::PointSet;
use crate::space_models::axioms::{check_axioms, AxiomReport};
use crate::space_models::finite::FinitePosetModel;
use crate::space_models::{ModelError, MoveSampler, SpaceModel, DEFAULT_SEARCH_BOUND};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GameKind {
    Choquet,
    BanachMazur,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Player {
    Empty,
    Nonempty,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Forfeit {
    pub player: Player,
    pub round: usize,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Outcome {
    NonemptyWins,
    EmptyWins,
    Undecided { budget: usize },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Round<O, X> {
    /// `x_i`; absent in the Banach–Mazur game.
    pub point: Option<X>,
    pub empty_open: O,
    pub nonempty_open: Option<O>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Transcript<O, X> {
    pub game: GameKind,
    pub rounds: Vec<Round<O, X>>,
    pub outcome: Outcome,
    pub witness: Option<X>,
    pub forfeit: Option<Forfeit>,
}

impl<O, X> Transcript<O, X> {
    pub fn nonempty_lost(&self) -> bool {
        self.outcome == Outcome::EmptyWins
    }
}

pub trait NonemptyStrategy<M: SpaceModel> {
    /// Answer to Empty's move `(x, U)`; `x` is absent in Banach–Mazur plays.
    fn respond(&mut self, m: &M, x: Option<&M::Point>, u: &M::Open) -> Result<M::Open, String>;
}

pub trait EmptyStrategy<M: SpaceModel> {
    /// A point and an open inside the previous Nonempty move (if any).
    fn next_move(&mut self, m: &M, prev: Option<&M::Open>) -> Option<(M::Point, M::Open)>;
}

/// `σ(x, U) = B` with `C` least such that `x ∈ C ⊆ U` and `B` least such
/// that `C ≪ B` and `x ∈ B`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StationaryFromRelation {
    pub bound: usize,
}

impl Default for StationaryFromRelation {
    fn default() -> Self {
        StationaryFromRelation {
            bound: DEFAULT_SEARCH_BOUND,
        }
    }
}

pub fn stationary_from_relation() -> StationaryFromRelation {
    StationaryFromRelation::default()
}

impl StationaryFromRelation {
    pub fn respond_at<M: SpaceModel>(
        &self,
        m: &M,
        x: &M::Point,
        u: &M::Open,
    ) -> Result<M::Open, ModelError> {
        if !m.contains(u, x) {
            return Err(ModelError::NotInOpen);
        }
        let c = m.least_inside(x, u, self.bound)?;
        m.least_successor(&c, x, self.bound)
    }
}

impl<M: SpaceModel> NonemptyStrategy<M> for StationaryFromRelation {
    fn respond(&mut self, m: &M, x: Option<&M::Point>, u: &M::Open) -> Result<M::Open, String> {
        let x = x.ok_or("a stationary Choquet strategy needs Empty's point")?;
        self.respond_at(m, x, u).map_err(|e| e.to_string())
    }
}

/// Plays a Choquet strategy in the Banach–Mazur game by choosing Empty's
/// point itself.
pub struct BmAdapter<S>(pub S);

impl<M: SpaceModel, S: NonemptyStrategy<M>> NonemptyStrategy<M> for BmAdapter<S> {
    fn respond(&mut self, m: &M, x: Option<&M::Point>, u: &M::Open) -> Result<M::Open, String> {
        match x {
            Some(x) => self.0.respond(m, Some(x), u),
            None => {
                let x = m.sample_point(u).ok_or("empty open")?;
                self.0.respond(m, Some(&x), u)
            }
        }
    }
}

/// Any closure as a Nonempty strategy.
pub struct FnStrategy<F>(pub F);

impl<M: SpaceModel, F> NonemptyStrategy<M> for FnStrategy<F>
where
    F: FnMut(&M, Option<&M::Point>, &M::Open) -> Result<M::Open, String>,
{
    fn respond(&mut self, m: &M, x: Option<&M::Point>, u: &M::Open) -> Result<M::Open, String> {
        (self.0)(m, x, u)
    }
}

/// Seeded random legal moves.
pub struct RandomEmpty<R> {
    pub rng: R,
}

impl RandomEmpty<ChaCha8Rng> {
    pub fn seeded(seed: u64) -> Self {
        RandomEmpty {
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }
}

impl<M: MoveSampler, R: Rng> EmptyStrategy<M> for RandomEmpty<R> {
    fn next_move(&mut self, m: &M, prev: Option<&M::Open>) -> Option<(M::Point, M::Open)> {
        m.random_move(&mut self.rng, prev)
    }
}

/// Shrinks as fast as the basis allows: the least basic open around a
/// sample point of the previous move.
pub struct DeepestDescent {
    pub start: usize,
    pub bound: usize,
}

impl<M: SpaceModel> EmptyStrategy<M> for DeepestDescent {
    fn next_move(&mut self, m: &M, prev: Option<&M::Open>) -> Option<(M::Point, M::Open)> {
        let u = match prev {
            Some(v) => v.clone(),
            None => m.basis(self.start)?,
        };
        let x = m.sample_point(&u)?;
        let c = m.least_inside(&x, &u, self.bound).ok()?;
        Some((x, c))
    }
}

/// Runs at most `rounds` rounds. On finite carriers the decreasing opens
/// stabilise and the verdict is exact; on symbolic models Nonempty is
/// declared the winner only when the model's limit construction certifies
/// a point in every move.
pub fn play<M, E, N>(
    kind: GameKind,
    empty: &mut E,
    nonempty: &mut N,
    m: &M,
    rounds: usize,
) -> Transcript<M::Open, M::Point>
where
    M: SpaceModel,
    E: EmptyStrategy<M>,
    N: NonemptyStrategy<M>,
{
    let mut t = Transcript {
        game: kind,
        rounds: Vec::new(),
        outcome: Outcome::Undecided { budget: rounds },
        witness: None,
        forfeit: None,
    };
    let mut prev: Option<M::Open> = None;
    for i in 0..rounds {
        let Some((x, u)) = empty.next_move(m, prev.as_ref()) else {
            t.forfeit = Some(Forfeit {
                player: Player::Empty,
                round: i,
                reason: "no move".into(),
            });
            t.outcome = Outcome::NonemptyWins;
            return t;
        };
        let empty_reason = if !m.contains(&u, &x) {
            Some("point outside its open")
        } else if prev.as_ref().is_some_and(|v| !m.is_subset(&u, v)) {
            Some("open not inside the previous move")
        } else {
            None
        };
        let shown_point = (kind == GameKind::Choquet).then(|| x.clone());
        if let Some(r) = empty_reason {
            t.rounds.push(Round {
                point: shown_point,
                empty_open: u,
                nonempty_open: None,
            });
            t.forfeit = Some(Forfeit {
                player: Player::Empty,
                round: i,
                reason: r.into(),
            });
            t.outcome = Outcome::NonemptyWins;
            return t;
        }
        let answer = nonempty.respond(m, shown_point.as_ref(), &u);
        let verdict = match &answer {
            Err(e) => Err(e.clone()),
            Ok(v) if !m.is_subset(v, &u) => Err("open not inside Empty's move".to_string()),
            Ok(v) if kind == GameKind::Choquet && !m.contains(v, &x) => {
                Err("open misses Empty's point".to_string())
            }
            Ok(v) if m.sample_point(v).is_none() => Err("empty open".to_string()),
            Ok(_) => Ok(()),
        };
        t.rounds.push(Round {
            point: shown_point,
            empty_open: u,
            nonempty_open: answer.clone().ok(),
        });
        if let Err(reason) = verdict {
            t.forfeit = Some(Forfeit {
                player: Player::Nonempty,
                round: i,
                reason,
            });
            t.outcome = Outcome::EmptyWins;
            return t;
        }
        prev = answer.ok();
    }
    let vs: Vec<M::Open> = t
        .rounds
        .iter()
        .filter_map(|r| r.nonempty_open.clone())
        .collect();
    if vs.is_empty() {
        return t;
    }
    let witness = if m.is_finite() {
        // opens decrease in a finite lattice; the last one is the limit
        m.sample_point(vs.last().unwrap())
    } else {
        m.limit_point(&vs).ok()
    };
    if let Some(w) = witness {
        let in_all = vs.iter().all(|v| m.contains(v, &w))
            && t.rounds.iter().all(|r| m.contains(&r.empty_open, &w));
        if in_all {
            t.outcome = Outcome::NonemptyWins;
            t.witness = Some(w);
        }
    }
    t
}

/// How well the played opens of a won game converge to the witness:
/// every basic neighbourhood of it among the first `bound` basis elements
/// should contain some played Nonempty move.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConvergenceReport {
    pub neighbourhoods: usize,
    pub refined: usize,
}

impl ConvergenceReport {
    pub fn converges(&self) -> bool {
        self.neighbourhoods == self.refined
    }
}

pub fn convergence_audit<M: SpaceModel>(
    m: &M,
    t: &Transcript<M::Open, M::Point>,
    bound: usize,
) -> Option<ConvergenceReport> {
    let w = t.witness.as_ref()?;
    let vs: Vec<&M::Open> = t
        .rounds
        .iter()
        .filter_map(|r| r.nonempty_open.as_ref())
        .collect();
    let lim = m.basis_len().map_or(bound, |l| l.min(bound));
    let mut rep = ConvergenceReport {
        neighbourhoods: 0,
        refined: 0,
    };
    for n in 0..lim {
        let Some(b) = m.basis(n) else { break };
        if m.contains(&b, w) {
            rep.neighbourhoods += 1;
            if vs.iter().any(|v| m.is_subset(v, &b)) {
                rep.refined += 1;
            }
        }
    }
    Some(rep)
}

/// A finite-poset model whose relation is an explicit table of basis
/// index pairs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TableModel {
    pub base: FinitePosetModel,
    pub pairs: BTreeSet<(usize, usize)>,
}

impl SpaceModel for TableModel {
    type Open = PointSet;
    type Point = usize;

    fn name(&self) -> &'static str {
        "table"
    }

    fn basis(&self, n: usize) -> Option<PointSet> {
        self.base.basis(n)
    }

    fn basis_len(&self) -> Option<usize> {
        self.base.basis_len()
    }

    fn contains(&self, u: &PointSet, x: &usize) -> bool {
        u.contains(*x)
    }

    fn is_subset(&self, u: &PointSet, v: &PointSet) -> bool {
        u.is_subset(*v)
    }

    fn approx(&self, u: &PointSet, v: &PointSet) -> bool {
        match (self.base.index_of(*u), self.base.index_of(*v)) {
            (Some(i), Some(j)) => self.pairs.contains(&(i, j)),
            _ => false,
        }
    }

    fn sample_point(&self, u: &PointSet) -> Option<usize> {
        (*u).min()
    }

    fn is_finite(&self) -> bool {
        true
    }
}

/// `B ≪ C ⟺ ∃D ⊆ B basic, ∃x ∈ D. x ∈ C ⊆ τ(x, D)`.
pub fn relation_from_strategy<N: NonemptyStrategy<FinitePosetModel>>(
    tau: &mut N,
    m: &FinitePosetModel,
) -> TableModel {
    let basis = m.basis_sets().to_vec();
    let mut responses: Vec<(PointSet, usize, PointSet)> = Vec::new();
    for &d in &basis {
        for x in d.iter() {
            if let Ok(r) = tau.respond(m, Some(&x), &d) {
                responses.push((d, x, r));
            }
        }
    }
    let mut pairs = BTreeSet::new();
    for (i, &b) in basis.iter().enumerate() {
        for (j, &c) in basis.iter().enumerate() {
            let ok = responses
                .iter()
                .any(|&(d, x, r)| d.is_subset(b) && c.contains(x) && c.is_subset(r));
            if ok {
                pairs.insert((i, j));
            }
        }
    }
    TableModel {
        base: m.clone(),
        pairs,
    }
}

/// Conditions (1)–(4) for a table relation, exhaustively on the carrier.
pub fn table_axioms(t: &TableModel) -> AxiomReport {
    let opens = t.base.basis_sets().to_vec();
    let pts: Vec<usize> = (0..t.base.poset().len()).collect();
    check_axioms(t, &opens, &pts, opens.len() + 1, opens.len() + 1)
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct TournamentReport {
    pub plays: usize,
    pub nonempty_wins: usize,
    pub losses: usize,
    pub undecided: usize,
}

/// Seeded random legal Empty players against the relation strategy.
pub fn tournament<M: MoveSampler>(
    m: &M,
    kind: GameKind,
    plays: usize,
    rounds: usize,
    seed: u64,
) -> TournamentReport {
    let mut rep = TournamentReport {
        plays,
        ..Default::default()
    };
    for k in 0..plays {
        let mut empty = RandomEmpty::seeded(seed.wrapping_add(k as u64));
        let t = match kind {
            GameKind::Choquet => play(kind, &mut empty, &mut stationary_from_relation(), m, rounds),
            GameKind::BanachMazur => play(
                kind,
                &mut empty,
                &mut BmAdapter(stationary_from_relation()),
                m,
                rounds,
            ),
        };
        match t.outcome {
            Outcome::NonemptyWins => rep.nonempty_wins += 1,
            Outcome::EmptyWins => rep.losses += 1,
            Outcome::Undecided { .. } => rep.undecided += 1,
        }
    }
    rep
}
