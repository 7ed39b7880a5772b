//! Sampled checks of the approximation-relation conditions (1)–(4).

use serde::{Deserialize, Serialize};

use super::SpaceModel;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violation {
    pub condition: u8,
    pub detail: String,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct AxiomReport {
    pub opens: usize,
    pub pairs: usize,
    pub triples: usize,
    pub chains: usize,
    pub violations: Vec<Violation>,
}

impl AxiomReport {
    pub fn ok(&self) -> bool {
        self.violations.is_empty()
    }

    fn fail(&mut self, condition: u8, detail: String) {
        if self.violations.len() < 32 {
            self.violations.push(Violation { condition, detail });
        }
    }
}

/// Checks (1) and (2) on all pairs and triples of the given opens, (3) for
/// every given point inside each open, and (4) on chains of length
/// `chain_len` grown by least-successor steps around each point.
pub fn check_axioms<M: SpaceModel>(
    m: &M,
    opens: &[M::Open],
    points: &[M::Point],
    chain_len: usize,
    bound: usize,
) -> AxiomReport {
    let mut rep = AxiomReport {
        opens: opens.len(),
        ..Default::default()
    };
    for u in opens {
        for v in opens {
            rep.pairs += 1;
            if !m.approx(u, v) {
                continue;
            }
            if !m.is_subset(v, u) {
                rep.fail(1, format!("{u:?} ≪ {v:?} but not contained"));
            }
            for t in opens {
                rep.triples += 1;
                if m.is_subset(u, t) && !m.approx(t, v) {
                    rep.fail(
                        2,
                        format!("{u:?} ⊆ {t:?}, {u:?} ≪ {v:?}, not {t:?} ≪ {v:?}"),
                    );
                }
            }
        }
    }
    for u in opens {
        for x in points.iter().filter(|x| m.contains(u, x)) {
            match m.least_successor(u, x, bound) {
                Ok(w) if m.contains(&w, x) && m.approx(u, &w) => {}
                other => {
                    rep.fail(3, format!("{x:?} ∈ {u:?}: {other:?}"));
                    continue;
                }
            }
            let mut chain = vec![u.clone()];
            for _ in 1..chain_len {
                match m.least_successor(chain.last().unwrap(), x, bound) {
                    Ok(w) => chain.push(w),
                    Err(e) => {
                        rep.fail(3, format!("{x:?}: {e}"));
                        break;
                    }
                }
            }
            rep.chains += 1;
            match m.limit_point(&chain) {
                Ok(y) if chain.iter().all(|c| m.contains(c, &y)) => {}
                other => rep.fail(4, format!("chain {chain:?}: {other:?}")),
            }
        }
    }
    rep
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::finite_space::{all_posets, FinitePoset};
    use crate::space_models::clauses::{ClauseModel, ClauseRow, ClauseSystem};
    use crate::space_models::cylinder::{all_words, Clopen, CylPoint, CylRelation, CylinderModel};
    use crate::space_models::finite::{FiniteBasis, FinitePosetModel, FiniteRelation};
    use crate::space_models::powerset::{FinSet, PInfinityModel, PowersetModel, SymbolicSet};

    fn finsets(n: u64) -> Vec<FinSet> {
        (0..n).map(FinSet::from_bits).collect()
    }

    #[test]
    fn powerset_models() {
        let opens = finsets(32);
        let pts: Vec<SymbolicSet> = finsets(64).into_iter().map(SymbolicSet::finite).collect();
        assert!(check_axioms(&PowersetModel, &opens, &pts, 4, 1 << 10).ok());
        let pts: Vec<SymbolicSet> = finsets(64)
            .into_iter()
            .map(|s| SymbolicSet::with_tail(s, 7))
            .collect();
        let rep = check_axioms(&PInfinityModel, &opens, &pts, 5, 1 << 10);
        assert!(rep.ok(), "{:?}", rep.violations);
    }

    #[test]
    fn clause_models() {
        let fs = |v: &[u32]| FinSet::new(v.iter().copied());
        let sys = ClauseSystem::finite(vec![
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
        let m = ClauseModel { sys };
        let opens = finsets(128);
        let pts: Vec<SymbolicSet> = finsets(128)
            .into_iter()
            .map(SymbolicSet::finite)
            .filter(|x| m.sys.first_failed_clause(x).is_none())
            .collect();
        let rep = check_axioms(&m, &opens, &pts, 4, 1 << 10);
        assert!(rep.ok(), "{:?}", rep.violations);
        let pinf = ClauseModel {
            sys: ClauseSystem::pinf(16),
        };
        let pts: Vec<SymbolicSet> = finsets(64)
            .into_iter()
            .map(|s| SymbolicSet::with_tail(s, 7))
            .collect();
        let rep = check_axioms(&pinf, &finsets(32), &pts, 5, 1 << 10);
        assert!(rep.ok(), "{:?}", rep.violations);
    }

    #[test]
    fn cylinder_models() {
        for rel in [CylRelation::Containment, CylRelation::Polish] {
            let m = CylinderModel::new(2, rel).unwrap();
            let opens: Vec<Clopen> = (0..60).filter_map(|n| m.basis(n)).collect();
            let mut pts = Vec::new();
            for w in all_words(2, 3) {
                for p in [vec![0], vec![1], vec![0, 1]] {
                    pts.push(CylPoint::new(w.clone(), p).unwrap());
                }
            }
            let rep = check_axioms(&m, &opens, &pts, 5, 1 << 12);
            assert!(rep.ok(), "{rel:?} {:?}", rep.violations);
        }
    }

    #[test]
    fn finite_models_exhaustive() {
        let mut spaces = all_posets(4);
        spaces.push(FinitePoset::chain(3));
        for p in spaces {
            for basis in [FiniteBasis::Principal, FiniteBasis::AllOpens] {
                for rel in [FiniteRelation::WayBelow, FiniteRelation::Inclusion] {
                    let m = FinitePosetModel::new(p.clone(), basis, rel);
                    let opens = m.basis_sets().to_vec();
                    let pts: Vec<usize> = (0..p.len()).collect();
                    let rep = check_axioms(&m, &opens, &pts, 6, 64);
                    assert!(rep.ok(), "{basis:?} {rel:?} {:?}", rep.violations);
                }
            }
        }
    }
}
