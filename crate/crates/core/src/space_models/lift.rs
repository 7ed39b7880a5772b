//! Transport of an approximation relation to another basis:
//! `C ⋘ D` iff `C ⊇ U ≪ V ⊇ D` for some `U, V` of the old basis.

use super::Tri;

/// Decides `C ⋘ D` by searching the given old-basis elements. When
/// `exhaustive` is false a failed search is `Unknown`.
pub fn lift_relation<O, R, S>(old: &[O], rel: R, subset: S, c: &O, d: &O, exhaustive: bool) -> Tri
where
    R: Fn(&O, &O) -> bool,
    S: Fn(&O, &O) -> bool,
{
    let below_c: Vec<&O> = old.iter().filter(|u| subset(u, c)).collect();
    let above_d: Vec<&O> = old.iter().filter(|v| subset(d, v)).collect();
    let found = below_c.iter().any(|u| above_d.iter().any(|v| rel(u, v)));
    match (found, exhaustive) {
        (true, _) => Tri::True,
        (false, true) => Tri::False,
        (false, false) => Tri::Unknown,
    }
}

/// A lifted relation together with the finite slice of the old basis it
/// searches.
pub struct Lifted<'a, O, R, S> {
    pub old: &'a [O],
    pub rel: R,
    pub subset: S,
    pub exhaustive: bool,
}

impl<O, R, S> Lifted<'_, O, R, S>
where
    R: Fn(&O, &O) -> bool,
    S: Fn(&O, &O) -> bool,
{
    pub fn related(&self, c: &O, d: &O) -> Tri {
        lift_relation(self.old, &self.rel, &self.subset, c, d, self.exhaustive)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::space_models::powerset::{FinSet, PInfinityModel};

    fn basis(n: u64) -> Vec<FinSet> {
        (0..n).map(FinSet::from_bits).collect()
    }

    // O_A ⊆ O_B as opens of P(N)
    fn sub(a: &FinSet, b: &FinSet) -> bool {
        b.is_subset(a)
    }

    #[test]
    fn lifting_to_same_basis_contains_original() {
        let old = basis(32);
        for a in &old {
            for b in &old {
                if PInfinityModel::relation(a, b) {
                    assert_eq!(
                        lift_relation(&old, PInfinityModel::relation, sub, a, b, true),
                        Tri::True
                    );
                }
            }
        }
    }

    #[test]
    fn empty_relation_lifts_to_empty() {
        let old = basis(16);
        for a in &old {
            for b in &old {
                assert_eq!(
                    lift_relation(&old, |_, _| false, sub, a, b, true),
                    Tri::False
                );
                assert_eq!(
                    lift_relation(&old, |_, _| false, sub, a, b, false),
                    Tri::Unknown
                );
            }
        }
    }

    #[test]
    fn even_basis_lift_satisfies_first_conditions() {
        // O_A with |A| even, A ⊆ {0..5}; the old basis ranges over {0..6}
        let old = basis(128);
        let new: Vec<FinSet> = basis(64).into_iter().filter(|a| a.len() % 2 == 0).collect();
        let l = Lifted {
            old: &old,
            rel: PInfinityModel::relation,
            subset: sub,
            exhaustive: true,
        };
        let r = |a: &FinSet, b: &FinSet| l.related(a, b) == Tri::True;
        for u in &new {
            for v in &new {
                if r(u, v) {
                    assert!(sub(v, u), "(1) {u} {v}");
                    for t in &new {
                        if sub(u, t) {
                            assert!(r(t, v), "(2) {u} {v} {t}");
                        }
                    }
                }
            }
            // (3) for points u ∪ {j} ∪ tail: a refinement with a larger maximum
            let x_max = u.max_elem() + 1;
            let ok = new
                .iter()
                .any(|w| r(u, w) && w.max_elem() <= x_max + 1 && u.is_subset(w));
            assert!(ok || u.max_elem() >= 4, "(3) {u}");
        }
    }
}
