//! Witnesses for the Π⁰₂ Baire property: given constraints `U_j ∪ F_j`
//! with `U_j` open, `F_j` closed and the union dense, build a `≪`-chain
//! below a basic open `O` whose limit point meets every constraint.

use serde::{Deserialize, Serialize};

use super::cylinder::{Clopen, CylPoint, CylinderModel};
use super::powerset::{FinSet, PInfinityModel, PowersetModel, SymbolicSet};
use super::{ModelError, SpaceModel};

/// An open set given symbolically, with the decisions the construction
/// needs about basic opens.
pub trait OpenPredicate<M: SpaceModel> {
    /// `o ⊆ self`
    fn includes(&self, m: &M, o: &M::Open) -> bool;
    /// `o ∩ self ≠ ∅`
    fn meets(&self, m: &M, o: &M::Open) -> bool;
    fn contains(&self, m: &M, x: &M::Point) -> bool;
}

/// `U ∪ F` where `F` is the complement of the open `g`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Constraint<P> {
    pub u: P,
    pub g: P,
}

impl<P> Constraint<P> {
    pub fn holds_at<M: SpaceModel>(&self, m: &M, x: &M::Point) -> bool
    where
        P: OpenPredicate<M>,
    {
        self.u.contains(m, x) || !self.g.contains(m, x)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum BaireErrorKind {
    BudgetExceeded,
    DensityViolation {
        constraint: usize,
        round: usize,
    },
    /// The limit point misses a constraint that was scheduled.
    WitnessFailed {
        constraint: usize,
    },
    Model(ModelError),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BaireFailure<O> {
    pub kind: BaireErrorKind,
    pub chain: Vec<O>,
    pub examined: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BaireWitness<O, X> {
    pub chain: Vec<O>,
    pub point: X,
    /// Constraints whose schedule slot came up at least once.
    pub scheduled: Vec<bool>,
    /// Rounds in which the refinement `W*` inside `U_π(n)` was taken.
    pub refined: Vec<usize>,
    pub examined: usize,
}

pub const DEFAULT_BUDGET: usize = 10_000;

struct Search<'a, M: SpaceModel> {
    m: &'a M,
    examined: usize,
    budget: usize,
}

impl<M: SpaceModel> Search<'_, M> {
    /// Least basis element satisfying `pred`, charged against the budget.
    fn least_approx(&mut self, u: &M::Open) -> Result<Option<M::Open>, ()> {
        if self.examined >= self.budget {
            return Err(());
        }
        self.examined += 1;
        Ok(self.m.least_approx(u, self.budget - self.examined).ok())
    }

    fn least<F: Fn(&M::Open) -> bool>(&mut self, pred: F) -> Result<Option<M::Open>, ()> {
        let end = self.m.basis_len().unwrap_or(usize::MAX);
        let mut n = 0;
        while n < end {
            if self.examined >= self.budget {
                return Err(());
            }
            self.examined += 1;
            match self.m.basis(n) {
                Some(o) if pred(&o) => return Ok(Some(o)),
                Some(_) => {}
                None => break,
            }
            n += 1;
        }
        Ok(None)
    }
}

/// Runs `rounds` steps of the construction. `schedule[n-1]` is the
/// constraint treated at step `n`; by default constraints are visited
/// round-robin.
pub fn baire_witness<M, P>(
    m: &M,
    constraints: &[Constraint<P>],
    o: &M::Open,
    schedule: Option<&[usize]>,
    rounds: usize,
    budget: usize,
) -> Result<BaireWitness<M::Open, M::Point>, BaireFailure<M::Open>>
where
    M: SpaceModel,
    P: OpenPredicate<M>,
{
    let mut s = Search {
        m,
        examined: 0,
        budget,
    };
    let mut chain: Vec<M::Open> = Vec::new();
    let fail = |kind, chain: &Vec<M::Open>, examined| BaireFailure {
        kind,
        chain: chain.clone(),
        examined,
    };
    let nonempty = |w: &M::Open| m.sample_point(w).is_some();

    let o0 = match s.least_approx(o) {
        Ok(Some(w)) => w,
        Ok(None) => {
            return Err(fail(
                BaireErrorKind::Model(ModelError::SearchExhausted(s.examined)),
                &chain,
                s.examined,
            ))
        }
        Err(()) => return Err(fail(BaireErrorKind::BudgetExceeded, &chain, s.examined)),
    };
    chain.push(o0);
    let mut scheduled = vec![false; constraints.len()];
    let mut refined = Vec::new();
    for n in 1..=rounds {
        if constraints.is_empty() {
            break;
        }
        let j = match schedule {
            Some(pi) => pi[(n - 1) % pi.len()],
            None => (n - 1) % constraints.len(),
        };
        let c = &constraints[j];
        let prev = chain.last().unwrap().clone();
        let w = match s.least_approx(&prev) {
            Ok(Some(w)) => w,
            Ok(None) => {
                return Err(fail(
                    BaireErrorKind::Model(ModelError::SearchExhausted(s.examined)),
                    &chain,
                    s.examined,
                ))
            }
            Err(()) => return Err(fail(BaireErrorKind::BudgetExceeded, &chain, s.examined)),
        };
        let star = if c.u.meets(m, &w) {
            match s.least(|v| c.u.includes(m, v) && m.approx(&w, v) && nonempty(v)) {
                Ok(v) => v,
                Err(()) => return Err(fail(BaireErrorKind::BudgetExceeded, &chain, s.examined)),
            }
        } else {
            // no refinement inside U exists; the constraint must then be met
            // through F, which needs W ⊄ G
            if c.g.includes(m, &w) {
                return Err(fail(
                    BaireErrorKind::DensityViolation {
                        constraint: j,
                        round: n,
                    },
                    &chain,
                    s.examined,
                ));
            }
            None
        };
        scheduled[j] = true;
        match star {
            Some(v) => {
                refined.push(n);
                chain.push(v);
            }
            None => chain.push(w),
        }
    }
    let point = m
        .limit_point(&chain)
        .map_err(|e| fail(BaireErrorKind::Model(e), &chain, s.examined))?;
    if !m.contains(o, &point) {
        return Err(fail(
            BaireErrorKind::Model(ModelError::NotInOpen),
            &chain,
            s.examined,
        ));
    }
    for (j, c) in constraints.iter().enumerate() {
        if scheduled[j] && !c.holds_at(m, &point) {
            return Err(fail(
                BaireErrorKind::WitnessFailed { constraint: j },
                &chain,
                s.examined,
            ));
        }
    }
    Ok(BaireWitness {
        chain,
        point,
        scheduled,
        refined,
        examined: s.examined,
    })
}

/// Open subsets of a cylinder space.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CylOpen {
    Clopen(Clopen),
    /// Points of `within` having `symbol` at some position `≥ position`.
    SymbolAfter {
        symbol: u8,
        position: usize,
        within: Clopen,
    },
}

impl CylOpen {
    fn word_has(symbol: u8, position: usize, w: &[u8]) -> bool {
        w.iter().skip(position).any(|&c| c == symbol)
    }
}

impl OpenPredicate<CylinderModel> for CylOpen {
    fn includes(&self, _m: &CylinderModel, o: &Clopen) -> bool {
        match self {
            CylOpen::Clopen(c) => o.is_subset_of(c),
            CylOpen::SymbolAfter {
                symbol,
                position,
                within,
            } => {
                o.is_subset_of(within)
                    && o.words()
                        .iter()
                        .all(|w| Self::word_has(*symbol, *position, w))
            }
        }
    }

    fn meets(&self, m: &CylinderModel, o: &Clopen) -> bool {
        match self {
            CylOpen::Clopen(c) => !o.intersection(c, m.alphabet).is_empty(),
            // every cylinder can be extended by the symbol later on
            CylOpen::SymbolAfter { symbol, within, .. } => {
                *symbol < m.alphabet && !o.intersection(within, m.alphabet).is_empty()
            }
        }
    }

    fn contains(&self, _m: &CylinderModel, x: &CylPoint) -> bool {
        match self {
            CylOpen::Clopen(c) => c.contains_point(x),
            CylOpen::SymbolAfter {
                symbol,
                position,
                within,
            } => {
                // the symbol occurs in the prefix part or anywhere in the period
                within.contains_point(x)
                    && (Self::word_has(*symbol, *position, &x.prefix) || x.period.contains(symbol))
            }
        }
    }
}

/// Open subsets of `P(N)` given as unions of basic opens `O_A`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PnOpen {
    Union(Vec<FinSet>),
}

impl PnOpen {
    pub fn whole() -> Self {
        PnOpen::Union(vec![FinSet::empty()])
    }

    pub fn nothing() -> Self {
        PnOpen::Union(Vec::new())
    }

    fn parts(&self) -> &[FinSet] {
        match self {
            PnOpen::Union(v) => v,
        }
    }
}

macro_rules! pn_predicate {
    ($model:ty) => {
        impl OpenPredicate<$model> for PnOpen {
            fn includes(&self, _m: &$model, o: &FinSet) -> bool {
                self.parts().iter().any(|b| b.is_subset(o))
            }

            fn meets(&self, _m: &$model, _o: &FinSet) -> bool {
                !self.parts().is_empty()
            }

            fn contains(&self, _m: &$model, x: &SymbolicSet) -> bool {
                self.parts().iter().any(|b| x.includes(b))
            }
        }
    };
}

pn_predicate!(PowersetModel);
pn_predicate!(PInfinityModel);

/// A target basic open with constraints, on a cylinder model.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CylInstance {
    pub target: Clopen,
    pub constraints: Vec<Constraint<CylOpen>>,
}

impl CylInstance {
    /// `k` constraints `U_j ∪ (X ∖ G_j)` with `G_j` a random clopen and
    /// `U_j` the points of `G_j` showing a random symbol after a random
    /// position, which is dense in `G_j`.
    pub fn random<R: rand::Rng>(rng: &mut R, m: &CylinderModel, k: usize) -> Self {
        let a = m.alphabet;
        let word =
            |rng: &mut R, len: usize| (0..len).map(|_| rng.gen_range(0..a)).collect::<Vec<u8>>();
        let tlen = rng.gen_range(0..=2);
        let target = Clopen::cylinder(word(rng, tlen));
        let constraints = (0..k)
            .map(|_| {
                let n = rng.gen_range(1..=3);
                let mut words = Vec::with_capacity(n);
                for _ in 0..n {
                    let len = rng.gen_range(1..=2);
                    words.push(word(rng, len));
                }
                let g = Clopen::from_words(words, a);
                let u = CylOpen::SymbolAfter {
                    symbol: rng.gen_range(0..a),
                    position: rng.gen_range(0..=2),
                    within: g.clone(),
                };
                Constraint {
                    u,
                    g: CylOpen::Clopen(g),
                }
            })
            .collect();
        CylInstance {
            target,
            constraints,
        }
    }

    /// Canonical clopens throughout; rejects symbols outside the alphabet.
    pub fn canonical(&self, m: &CylinderModel) -> Result<CylInstance, ModelError> {
        let k = m.alphabet;
        let open = |o: &CylOpen| -> Result<CylOpen, ModelError> {
            Ok(match o {
                CylOpen::Clopen(c) => CylOpen::Clopen(c.canonical(k)?),
                CylOpen::SymbolAfter {
                    symbol,
                    position,
                    within,
                } => {
                    if *symbol >= k {
                        return Err(ModelError::Invalid(format!(
                            "symbol {symbol} outside 0..{k}"
                        )));
                    }
                    CylOpen::SymbolAfter {
                        symbol: *symbol,
                        position: *position,
                        within: within.canonical(k)?,
                    }
                }
            })
        };
        let constraints = self
            .constraints
            .iter()
            .map(|c| {
                Ok(Constraint {
                    u: open(&c.u)?,
                    g: open(&c.g)?,
                })
            })
            .collect::<Result<_, ModelError>>()?;
        Ok(CylInstance {
            target: self.target.canonical(k)?,
            constraints,
        })
    }

    /// The point lies in the target and satisfies every constraint.
    pub fn verify(&self, m: &CylinderModel, x: &CylPoint) -> bool {
        self.target.contains_point(x) && self.constraints.iter().all(|c| c.holds_at(m, x))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::space_models::cylinder::CylRelation;

    #[test]
    fn degenerate_density_on_pn() {
        let cs = vec![
            Constraint {
                u: PnOpen::whole(),
                g: PnOpen::nothing()
            };
            2
        ];
        let o = FinSet::new([1]);
        let w = baire_witness(&PowersetModel, &cs, &o, None, 6, DEFAULT_BUDGET).unwrap();
        assert!(w.point.includes(&o));
    }

    #[test]
    fn cylinder_two_dense_opens() {
        let m = CylinderModel::new(2, CylRelation::Containment).unwrap();
        let cs: Vec<Constraint<CylOpen>> = (0..2)
            .map(|k| Constraint {
                u: CylOpen::SymbolAfter {
                    symbol: 1,
                    position: k,
                    within: Clopen::whole(),
                },
                g: CylOpen::Clopen(Clopen::whole()),
            })
            .collect();
        let o = Clopen::cylinder(vec![0]);
        let w = baire_witness(&m, &cs, &o, None, 6, DEFAULT_BUDGET).unwrap();
        assert_eq!(w.point.symbol(0), 0);
        assert!(cs.iter().all(|c| c.u.contains(&m, &w.point)));
        assert!(w.chain.last().unwrap().depth() >= 2);
        let p = CylinderModel::new(2, CylRelation::Polish).unwrap();
        let w = baire_witness(&p, &cs, &o, None, 4, DEFAULT_BUDGET).unwrap();
        assert!(cs.iter().all(|c| c.u.contains(&p, &w.point)));
    }

    #[test]
    fn non_dense_constraint_is_reported() {
        let m = CylinderModel::new(2, CylRelation::Containment).unwrap();
        // U = [1], F = ∅: misses everything below [0]
        let cs = vec![Constraint {
            u: CylOpen::Clopen(Clopen::cylinder(vec![1])),
            g: CylOpen::Clopen(Clopen::whole()),
        }];
        let e = baire_witness(&m, &cs, &Clopen::cylinder(vec![0]), None, 4, DEFAULT_BUDGET)
            .unwrap_err();
        assert_eq!(
            e.kind,
            BaireErrorKind::DensityViolation {
                constraint: 0,
                round: 1
            }
        );
    }

    #[test]
    fn open_union_closed_constraint() {
        let m = CylinderModel::new(2, CylRelation::Containment).unwrap();
        let g = Clopen::from_words(vec![vec![0, 1], vec![1]], 2);
        let cs = vec![Constraint {
            u: CylOpen::SymbolAfter {
                symbol: 1,
                position: 2,
                within: g.clone(),
            },
            g: CylOpen::Clopen(g),
        }];
        let w = baire_witness(&m, &cs, &Clopen::whole(), None, 3, DEFAULT_BUDGET).unwrap();
        assert!(cs[0].holds_at(&m, &w.point));
    }

    #[test]
    fn random_instances_verify() {
        use rand::SeedableRng;
        let m = CylinderModel::new(3, CylRelation::Containment).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        for _ in 0..20 {
            let inst = CylInstance::random(&mut rng, &m, 3);
            let w = baire_witness(&m, &inst.constraints, &inst.target, None, 6, DEFAULT_BUDGET)
                .unwrap();
            assert!(inst.verify(&m, &w.point), "{inst:?}");
        }
    }

    #[test]
    fn tiny_budget_is_reported() {
        let m = CylinderModel::new(2, CylRelation::Containment).unwrap();
        let cs = vec![Constraint {
            u: CylOpen::SymbolAfter {
                symbol: 1,
                position: 5,
                within: Clopen::whole(),
            },
            g: CylOpen::Clopen(Clopen::whole()),
        }];
        let e = baire_witness(&m, &cs, &Clopen::cylinder(vec![0]), None, 4, 10).unwrap_err();
        assert_eq!(e.kind, BaireErrorKind::BudgetExceeded);
    }
}
