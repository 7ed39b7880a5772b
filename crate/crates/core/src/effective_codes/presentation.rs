//! Staged presentations of a set and its complement as countable
//! intersections of unions of basis elements: `A = ⋂_n ⋃ I_n^1` and
//! `X ∖ A = ⋂_n ⋃ I_n^0`, each row enumerated in stages.

use serde::{Deserialize, Serialize};

use crate::finite_space::PointSet;
use crate::space_models::{
    Clopen, CylPoint, CylinderModel, FinitePosetModel, SpaceModel, UnionClosed,
};

use super::transform::TransformError;

pub trait StagedPresentation<M: SpaceModel> {
    fn name(&self) -> String;

    /// `I_n^{ε,t}` as opens; finite and monotone in `t`.
    fn row(&self, m: &M, eps: usize, n: usize, t: usize) -> Vec<M::Open>;

    /// Ground-truth membership where the presentation knows it.
    fn truth(&self, _m: &M, _x: &M::Point) -> Option<bool> {
        None
    }
}

/// Number of leading rows `q < t` of side `eps` whose stage-`t` union holds
/// `x`.
pub fn leading_rows<M: SpaceModel, P: StagedPresentation<M> + ?Sized>(
    m: &M,
    pres: &P,
    eps: usize,
    x: &M::Point,
    t: usize,
) -> usize {
    (0..t)
        .take_while(|&q| pres.row(m, eps, q, t).iter().any(|o| m.contains(o, x)))
        .count()
}

/// Stage-`t` guess for membership: the side whose rows hold `x` longer.
/// `None` while both sides hold `x` through every row.
pub fn stage_guess<M: SpaceModel, P: StagedPresentation<M> + ?Sized>(
    m: &M,
    pres: &P,
    x: &M::Point,
    t: usize,
) -> Option<bool> {
    let f1 = leading_rows(m, pres, 1, x, t);
    let f0 = leading_rows(m, pres, 0, x, t);
    match (f1 == t, f0 == t) {
        (true, false) => Some(true),
        (false, true) => Some(false),
        _ => None,
    }
}

/// Checks that rows grow with the stage for `n < rows` and `t < stages`.
pub fn check_monotone<M: SpaceModel, P: StagedPresentation<M> + ?Sized>(
    m: &M,
    pres: &P,
    rows: usize,
    stages: usize,
) -> Result<(), TransformError> {
    for eps in 0..2 {
        for n in 0..rows {
            for t in 1..stages {
                let prev = pres.row(m, eps, n, t - 1);
                let cur = pres.row(m, eps, n, t);
                if prev.iter().any(|o| !cur.contains(o)) {
                    return Err(TransformError::NotMonotone {
                        eps,
                        row: n,
                        stage: t,
                    });
                }
            }
        }
    }
    Ok(())
}

/// Every test point must fall in exactly one side at stage `t`, and agree
/// with the ground truth when it is known.
pub fn check_points<M: SpaceModel, P: StagedPresentation<M> + ?Sized>(
    m: &M,
    pres: &P,
    points: &[M::Point],
    t: usize,
) -> Result<(), TransformError> {
    for (i, x) in points.iter().enumerate() {
        let g =
            stage_guess(m, pres, x, t).ok_or(TransformError::Ambiguous { point: i, stage: t })?;
        if pres.truth(m, x).is_some_and(|v| v != g) {
            return Err(TransformError::WrongSide { point: i });
        }
    }
    Ok(())
}

/// Rows given as lists of basis indices; row `n` of a side is
/// `rows[n mod len]`, the empty list standing for empty rows. Every row is
/// fully enumerated from stage 0.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RowListPresentation {
    pub one: Vec<Vec<usize>>,
    pub zero: Vec<Vec<usize>>,
}

impl RowListPresentation {
    pub fn from_json(s: &str) -> Result<Self, TransformError> {
        serde_json::from_str(s).map_err(|e| TransformError::Invalid(e.to_string()))
    }

    /// Rejects indices outside the basis and rows the model cannot join.
    pub fn validate<M: SpaceModel + UnionClosed>(&self, m: &M) -> Result<(), TransformError> {
        for rows in [&self.one, &self.zero] {
            for r in rows {
                let mut opens = Vec::with_capacity(r.len());
                for &i in r {
                    opens.push(m.basis(i).ok_or_else(|| {
                        TransformError::Invalid(format!("basis index {i} out of range"))
                    })?);
                }
                if !opens.is_empty() && m.union(&opens).is_none() {
                    return Err(TransformError::Invalid(format!(
                        "row {r:?} has no union in the basis"
                    )));
                }
            }
        }
        Ok(())
    }
}

impl<M: SpaceModel> StagedPresentation<M> for RowListPresentation {
    fn name(&self) -> String {
        "rows".into()
    }

    fn row(&self, m: &M, eps: usize, n: usize, _t: usize) -> Vec<M::Open> {
        let rows = if eps == 1 { &self.one } else { &self.zero };
        if rows.is_empty() {
            return Vec::new();
        }
        rows[n % rows.len()]
            .iter()
            .filter_map(|&i| m.basis(i))
            .collect()
    }
}

/// A clopen subset of a finite poset, presented by single rows `{A}` and
/// `{X ∖ A}`. Needs a basis holding both sides.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClopenPresentation {
    a: PointSet,
    rest: PointSet,
}

impl ClopenPresentation {
    pub fn new(m: &FinitePosetModel, a: PointSet) -> Result<Self, TransformError> {
        let carrier = m.poset().carrier();
        if !a.is_subset(carrier) {
            return Err(TransformError::Invalid(format!(
                "{a} is not a subset of the carrier"
            )));
        }
        let rest = a.complement_in(carrier);
        for s in [a, rest] {
            if !s.is_empty() && m.index_of(s).is_none() {
                return Err(TransformError::Invalid(format!("{s} is not a basic open")));
            }
        }
        Ok(ClopenPresentation { a, rest })
    }

    pub fn set(&self) -> PointSet {
        self.a
    }

    pub fn to_rows(&self, m: &FinitePosetModel) -> RowListPresentation {
        let side = |s: PointSet| {
            if s.is_empty() {
                Vec::new()
            } else {
                vec![vec![m.index_of(s).expect("checked")]]
            }
        };
        RowListPresentation {
            one: side(self.a),
            zero: side(self.rest),
        }
    }
}

impl StagedPresentation<FinitePosetModel> for ClopenPresentation {
    fn name(&self) -> String {
        format!("clopen {}", self.a)
    }

    fn row(&self, _m: &FinitePosetModel, eps: usize, _n: usize, _t: usize) -> Vec<PointSet> {
        let s = if eps == 1 { self.a } else { self.rest };
        if s.is_empty() {
            Vec::new()
        } else {
            vec![s]
        }
    }

    fn truth(&self, _m: &FinitePosetModel, x: &usize) -> Option<bool> {
        Some(self.a.contains(*x))
    }
}

/// On sequences over `{0, …, k-1}` with `k ≥ 3`: the open set of sequences
/// whose first nonzero symbol is 1. Its rows are `{[0^j 1] : j < t}` and
/// `{[0^n]} ∪ {[0^j s] : j < n, s ≥ 2}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct FirstOnePresentation;

impl FirstOnePresentation {
    pub fn check(m: &CylinderModel) -> Result<(), TransformError> {
        if m.alphabet < 3 {
            return Err(TransformError::Invalid(
                "needs an alphabet of at least 3 symbols".into(),
            ));
        }
        Ok(())
    }

    pub fn holds(x: &CylPoint) -> bool {
        let first = x.prefix.iter().chain(x.period.iter()).find(|&&s| s != 0);
        first == Some(&1)
    }
}

fn zeros_then(j: usize, s: u8) -> Vec<u8> {
    let mut w = vec![0; j];
    w.push(s);
    w
}

impl StagedPresentation<CylinderModel> for FirstOnePresentation {
    fn name(&self) -> String {
        "first-one".into()
    }

    fn row(&self, m: &CylinderModel, eps: usize, n: usize, t: usize) -> Vec<Clopen> {
        if eps == 1 {
            (0..t).map(|j| Clopen::cylinder(zeros_then(j, 1))).collect()
        } else {
            let mut out = vec![Clopen::cylinder(vec![0; n])];
            for j in 0..n {
                for s in 2..m.alphabet {
                    out.push(Clopen::cylinder(zeros_then(j, s)));
                }
            }
            out
        }
    }

    fn truth(&self, _m: &CylinderModel, x: &CylPoint) -> Option<bool> {
        Some(Self::holds(x))
    }
}
