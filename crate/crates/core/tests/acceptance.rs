//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! Runs as a plain binary (`harness = false`) so the lines always show.
//! Each criterion is checked against an oracle that does not share code
//! with the routine under test where that is practical. The process exits
//! nonzero only when a criterion's outcome differs from the expected one;
//! the successor-level part of the ambiguity audit is expected to fail, and
//! the run checks that it fails exactly on the known counterexamples.

use std::collections::BTreeSet;
use std::process::ExitCode;
use std::time::Instant;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use hier_core::alt_trees::{alt_levels, ambiguity_audit, AuditStatement, WfTree};
use hier_core::diff_hierarchy::{
    level_bruteforce, DiffCode, DiffEntry, Levels, Polarity, DEFAULT_STATE_BUDGET,
};
use hier_core::effective_codes::transform::run_transform;
use hier_core::effective_codes::{
    BorelCode, ClopenPresentation, FirstOnePresentation, HausdorffCode, Side, StagedPresentation,
    Verdict,
};
use hier_core::finite_space::{all_posets, random_poset, random_subset, FinitePoset, PointSet};
use hier_core::games::{
    play, stationary_from_relation, GameKind, Outcome, RandomEmpty, Transcript,
};
use hier_core::ordinals::Ordinal;
use hier_core::residues::residue_levels;
use hier_core::space_models::axioms::check_axioms;
use hier_core::space_models::baire::{baire_witness, CylInstance};
use hier_core::space_models::clauses::{ClauseModel, ClauseSystem};
use hier_core::space_models::cylinder::all_words;
use hier_core::space_models::{
    CylPoint, CylRelation, CylinderModel, FinSet, FiniteBasis, FinitePosetModel, FiniteRelation,
    MoveSampler, PInfinityModel, SpaceModel, SymbolicSet, UnionClosed,
};

/// What a criterion run produced.
struct Line {
    pass: bool,
    detail: String,
}

fn pass(detail: String) -> Line {
    Line { pass: true, detail }
}

fn fail(detail: String) -> Line {
    Line {
        pass: false,
        detail,
    }
}

// isomorphism types of posets on 0..=4 points
const POSET_COUNTS: [usize; 5] = [1, 1, 2, 5, 16];

fn three_way(p: &FinitePoset, a: PointSet) -> Result<Levels, String> {
    let r = residue_levels(p, a).map_err(|e| e.to_string())?;
    let t = alt_levels(p, a);
    let (b, _, _) = level_bruteforce(p, a, DEFAULT_STATE_BUDGET).map_err(|e| e.to_string())?;
    if r != t || t != b {
        return Err(format!("residues {r:?}, alt {t:?}, brute {b:?}"));
    }
    Ok(b)
}

fn criterion_1() -> Line {
    let mut subsets = 0;
    for (n, &count) in POSET_COUNTS.iter().enumerate() {
        let ps = all_posets(n);
        if ps.len() != count {
            return fail(format!(
                "{} posets on {n} points, expected {count}",
                ps.len()
            ));
        }
        for p in &ps {
            for bits in 0..(1u64 << n) {
                subsets += 1;
                if let Err(e) = three_way(p, PointSet(bits)) {
                    return fail(format!(
                        "{:?} set {}: {e}",
                        p.to_json_value(),
                        PointSet(bits)
                    ));
                }
            }
        }
    }
    pass(format!(
        "{} posets, {subsets} subsets, residues = alternating chains = brute force",
        POSET_COUNTS.iter().sum::<usize>()
    ))
}

fn nested_opens<R: Rng>(rng: &mut R, p: &FinitePoset) -> [PointSet; 3] {
    let a0 = p.up_closure(random_subset(rng, p.len()));
    let a1 = a0.union(p.up_closure(random_subset(rng, p.len())));
    let a2 = a1.union(p.up_closure(random_subset(rng, p.len())));
    [a0, a1, a2]
}

fn criterion_2() -> Line {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut points = 0;
    for _ in 0..500 {
        let n = rng.gen_range(1..=8);
        let density = rng.gen_range(0.0..0.7);
        let p = random_poset(&mut rng, n, density);
        let e = p.carrier();
        let [a0, a1, a2] = nested_opens(&mut rng, &p);
        for s in [a0, a1, a2] {
            if !p.is_open(s) {
                return fail(format!("{s} is not open"));
            }
        }
        let d = |sets: Vec<PointSet>| DiffCode::finite(sets, Polarity::D);
        let union_lhs = (d(vec![PointSet::EMPTY, a0]), d(vec![a1, a2]));
        let union_rhs = d(vec![a0, a1, a2]);
        let meet_lhs = (d(vec![PointSet::EMPTY, a0, e]), d(vec![a1, a2, e]));
        let meet_rhs = d(vec![a0, a1, a2, e]);
        // closed forms for nested opens
        let union_set = a0.union(a2.difference(a1));
        let meet_set = a1.difference(a0).union(e.difference(a2));
        for x in 0..n {
            points += 1;
            let u = union_lhs.0.eval_at(x) || union_lhs.1.eval_at(x);
            let m = meet_lhs.0.eval_at(x) && meet_lhs.1.eval_at(x);
            if u != union_rhs.eval_at(x) || u != union_set.contains(x) {
                return fail(format!("D2 ∪ D2 = D3 fails at {x} for {a0}, {a1}, {a2}"));
            }
            if m != meet_rhs.eval_at(x) || m != meet_set.contains(x) {
                return fail(format!("D3 ∩ D3 = D4 fails at {x} for {a0}, {a1}, {a2}"));
            }
        }
    }
    pass(format!(
        "500 posets, {points} points, both identities exact"
    ))
}

fn omega_plus(k: u64, c: u64) -> Ordinal {
    Ordinal::omega().mul_nat(c).add(&Ordinal::from_nat(k))
}

/// Independent reading of a code: the least index whose set holds `x`,
/// compared by parity of finite parts.
fn oracle_eval(code: &DiffCode<PointSet>, x: usize) -> bool {
    let least = code
        .entries()
        .iter()
        .filter(|e| e.set.contains(x))
        .map(|e| e.index.clone())
        .min();
    let in_d = least.is_some_and(|b| b.finite_part() % 2 != code.alpha().finite_part() % 2);
    match code.polarity() {
        Polarity::D => in_d,
        Polarity::CoD => !in_d,
    }
}

fn random_code<R: Rng>(rng: &mut R, p: &FinitePoset) -> DiffCode<PointSet> {
    let alpha = match rng.gen_range(0..3) {
        0 => Ordinal::from_nat(rng.gen_range(0..6)),
        1 => omega_plus(rng.gen_range(0..4), 1),
        _ => omega_plus(rng.gen_range(0..3), 2),
    };
    let mut pool: Vec<Ordinal> = (0..5)
        .map(Ordinal::from_nat)
        .chain((0..3).map(|k| omega_plus(k, 1)))
        .chain((0..2).map(|k| omega_plus(k, 2)))
        .filter(|o| *o < alpha)
        .collect();
    pool.shuffle(rng);
    let k = rng.gen_range(0..=pool.len().min(4));
    let mut idx: Vec<Ordinal> = pool.into_iter().take(k).collect();
    idx.sort();
    let entries = idx
        .into_iter()
        .map(|index| DiffEntry {
            index,
            set: p.up_closure(random_subset(rng, p.len())),
        })
        .collect();
    let polarity = if rng.gen_bool(0.5) {
        Polarity::D
    } else {
        Polarity::CoD
    };
    DiffCode::new(alpha, entries, polarity).expect("indices sorted below alpha")
}

fn criterion_3() -> Line {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let (mut pads, mut embeds) = (0, 0);
    for i in 0..1000 {
        let n = rng.gen_range(1..=7);
        let p = random_poset(&mut rng, n, 0.4);
        let code = random_code(&mut rng, &p);
        let norm = code.normalize_monotone();
        let target = match rng.gen_range(0..3) {
            0 => code.alpha().add(&Ordinal::from_nat(rng.gen_range(0..3))),
            1 => code.alpha().add(&Ordinal::omega()),
            _ => omega_plus(rng.gen_range(0..3), 3),
        };
        let padded = match code.pad(target) {
            Ok(c) => {
                pads += 1;
                Some(c)
            }
            Err(_) => None,
        };
        let embedded = code.embed_co(p.carrier()).ok();
        embeds += embedded.is_some() as usize;
        for x in 0..n {
            let want = oracle_eval(&code, x);
            if code.eval_at(x) != want || norm.eval_at(x) != want {
                return fail(format!("code {i} normalize changes the value at {x}"));
            }
            if padded.as_ref().is_some_and(|c| c.eval_at(x) != want) {
                return fail(format!("code {i} pad changes the value at {x}"));
            }
            if embedded
                .as_ref()
                .is_some_and(|c| c.eval_at(x) != want || oracle_eval(c, x) != want)
            {
                return fail(format!("code {i} embed_co changes the value at {x}"));
            }
        }
    }
    pass(format!(
        "1000 codes: normalize 1000, pad {pads}, embed_co {embeds}, all exact"
    ))
}

fn criterion_4() -> Line {
    let mut least_posets = 0;
    let mut least_bad = Vec::new();
    let mut successor = Vec::new();
    for n in 0..=4 {
        for p in all_posets(n) {
            let rep = match ambiguity_audit(&p, 3) {
                Ok(r) => r,
                Err(e) => return fail(e.to_string()),
            };
            least_posets += rep.has_least as usize;
            for c in &rep.checks {
                match c.statement {
                    AuditStatement::LeastElement if !c.violations.is_empty() => {
                        least_bad.push((p.to_json_value(), c.n, c.violations.clone()))
                    }
                    AuditStatement::Successor if c.n <= 2 => {
                        for s in &c.violations {
                            successor.push((p.clone(), *s, c.n));
                        }
                    }
                    _ => {}
                }
            }
        }
    }
    // words starting with 0 in the rootless binary tree: clopen, not trivial
    let mut witness_ok = true;
    for depth in 1..=3 {
        for rooted in [false, true] {
            let (p, words) = FinitePoset::word_tree(2, depth, rooted);
            let a =
                PointSet::from_points((0..words.len()).filter(|&i| words[i].first() == Some(&0)));
            let Ok(l) = three_way(&p, a) else {
                witness_ok = false;
                continue;
            };
            let ambiguous_at_1 = l.sigma <= 1 && l.pi <= 1 && l.sigma.min(l.pi) >= 1;
            witness_ok &= ambiguous_at_1 != rooted;
        }
    }
    let no_least = successor
        .iter()
        .all(|(p, _, _)| p.least_element().is_none());
    // the smallest counterexample: 0 < 3, 1 < 2 with A = {0, 2}
    let known = FinitePoset::from_cover(4, &[(0, 3), (1, 2)]).unwrap();
    let known_hit = level_bruteforce(&known, PointSet::from_points([0, 2]), DEFAULT_STATE_BUDGET)
        .is_ok_and(|(l, _, _)| l == Levels { sigma: 2, pi: 2 });
    let detail = format!(
        "least-element identity n ≤ 3 on {least_posets} posets: {} violations; \
         0Σ^(≤ω) truncations level-1 ambiguous without root only: {witness_ok}; \
         successor-level identity n ≤ 2 without least element: {} violations, all on posets \
         without least element: {no_least}, e.g. 0<3, 1<2 with A={{0,2}} has σ=π=2: {known_hit}",
        least_bad.len(),
        successor.len()
    );
    if least_bad.is_empty() && witness_ok && successor.is_empty() {
        pass(detail)
    } else {
        fail(detail)
    }
}

fn criterion_4_expected(line: &Line) -> bool {
    // only the successor-level part may fail
    !line.pass
        && line.detail.contains(": 0 violations;")
        && line.detail.contains("without root only: true")
        && line.detail.contains(": 8 violations, all on posets")
        && line.detail.contains("without least element: true")
        && line.detail.ends_with("σ=π=2: true")
}

fn finsets(n: u64) -> Vec<FinSet> {
    (0..n).map(FinSet::from_bits).collect()
}

fn criterion_5() -> Line {
    let m = ClauseModel {
        sys: ClauseSystem::pinf(64),
    };
    let opens = finsets(128);
    // the clause-generated relation is the direct one: ⊆ and a larger maximum
    for u in &opens {
        for v in &opens {
            let direct = u.is_subset(v) && u.max_elem() < v.max_elem();
            if m.approx(u, v) != direct || PInfinityModel.approx(u, v) != direct {
                return fail(format!("relation differs on {u}, {v}"));
            }
        }
    }
    let pts: Vec<SymbolicSet> = opens
        .iter()
        .flat_map(|s| {
            [
                SymbolicSet::with_tail(s.clone(), 7),
                SymbolicSet::with_tail(s.clone(), 10),
            ]
        })
        .collect();
    for (name, rep) in [
        ("clauses", check_axioms(&m, &opens, &pts, 5, 1 << 10)),
        (
            "direct",
            check_axioms(&PInfinityModel, &opens, &pts, 5, 1 << 10),
        ),
    ] {
        if !rep.ok() {
            return fail(format!("{name}: {:?}", rep.violations.first()));
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for c in 0..200 {
        let mut chain = vec![FinSet::new((0..7u32).filter(|_| rng.gen_bool(0.4)))];
        while chain.len() < 10 {
            let last = chain.last().unwrap();
            let top = (last.max_elem() + 1) as u32;
            let next = last
                .union(&FinSet::new((0..top).filter(|_| rng.gen_bool(0.3))))
                .union(&FinSet::new([top + rng.gen_range(0..3)]));
            chain.push(next);
        }
        if chain.windows(2).any(|w| !m.approx(&w[0], &w[1])) {
            return fail(format!("chain {c} is not ≪-increasing"));
        }
        let x = match m.sys.chain_limit(&chain) {
            Ok(x) => x,
            Err(e) => return fail(format!("chain {c}: {e}")),
        };
        if let Some(i) = chain
            .iter()
            .position(|b| !m.contains(b, &x) || !PInfinityModel.contains(b, &x))
        {
            return fail(format!("chain {c}: limit misses member {i}"));
        }
    }
    pass(format!("(1)-(3) on {} opens and {} points, relation equal to the direct form, 200 chain limits verified", opens.len(), pts.len()))
}

/// Nonempty won with a witness lying in every open of the play.
fn certified<M: SpaceModel>(m: &M, t: &Transcript<M::Open, M::Point>) -> bool {
    let (Outcome::NonemptyWins, Some(w), None) = (&t.outcome, &t.witness, &t.forfeit) else {
        return false;
    };
    t.rounds.iter().all(|r| {
        m.contains(&r.empty_open, w) && r.nonempty_open.as_ref().is_some_and(|o| m.contains(o, w))
    })
}

fn plays_on<M: MoveSampler>(m: &M, seeds: std::ops::Range<u64>) -> Result<usize, String> {
    let mut n = 0;
    for s in seeds {
        let t = play(
            GameKind::Choquet,
            &mut RandomEmpty::seeded(s),
            &mut stationary_from_relation(),
            m,
            20,
        );
        if !certified(m, &t) {
            return Err(format!("{} seed {s}: {:?}", m.name(), t.outcome));
        }
        n += 1;
    }
    Ok(n)
}

fn criterion_6() -> Line {
    let mut finite = Vec::new();
    for n in 1..=4 {
        for p in all_posets(n) {
            for basis in [FiniteBasis::Principal, FiniteBasis::AllOpens] {
                for rel in [FiniteRelation::WayBelow, FiniteRelation::Inclusion] {
                    finite.push(FinitePosetModel::new(p.clone(), basis, rel));
                }
            }
        }
    }
    let mut counts = [0usize; 3];
    for k in 0..1000u64 {
        let m = &finite[k as usize % finite.len()];
        match plays_on(m, k..k + 1) {
            Ok(c) => counts[0] += c,
            Err(e) => return fail(e),
        }
    }
    match plays_on(&PInfinityModel, 0..1000) {
        Ok(c) => counts[1] += c,
        Err(e) => return fail(e),
    }
    for (i, rel) in [CylRelation::Containment, CylRelation::Polish]
        .into_iter()
        .enumerate()
    {
        let m = CylinderModel::new(3, rel).unwrap();
        match plays_on(&m, 500 * i as u64..500 * (i as u64 + 1)) {
            Ok(c) => counts[2] += c,
            Err(e) => return fail(e),
        }
    }
    pass(format!(
        "20-round Choquet plays won with certified witness: finite {}, pinf {}, cylinder {}; 0 losses",
        counts[0], counts[1], counts[2]
    ))
}

/// Some point extending `w` satisfies the constraint, for every short `w`.
fn dense(m: &CylinderModel, inst: &CylInstance) -> bool {
    inst.constraints.iter().all(|c| {
        (0..=3).flat_map(|l| all_words(m.alphabet, l)).all(|w| {
            (0..=3).flat_map(|l| all_words(m.alphabet, l)).any(|v| {
                (0..m.alphabet).any(|s| {
                    let x = CylPoint::new([w.clone(), v.clone()].concat(), vec![s]).unwrap();
                    c.holds_at(m, &x)
                })
            })
        })
    })
}

fn criterion_7() -> Line {
    let m = CylinderModel::new(3, CylRelation::Containment).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut max_steps = 0;
    for i in 0..100 {
        let inst = CylInstance::random(&mut rng, &m, 3);
        if !dense(&m, &inst) {
            return fail(format!("instance {i} has a constraint that is not dense"));
        }
        let w = match baire_witness(&m, &inst.constraints, &inst.target, None, 6, 10_000) {
            Ok(w) => w,
            Err(e) => return fail(format!("instance {i}: {:?}", e.kind)),
        };
        if !inst.verify(&m, &w.point) || w.examined > 10_000 || !w.scheduled.iter().all(|&s| s) {
            return fail(format!("instance {i}: witness {} not verified", w.point));
        }
        max_steps = max_steps.max(w.examined);
    }
    pass(format!(
        "100 instances with 3 dense constraints verified, at most {max_steps} steps"
    ))
}

fn transform_case<M, P>(m: &M, pres: &P, points: &[M::Point]) -> Result<String, String>
where
    M: SpaceModel + UnionClosed,
    M::Open: std::hash::Hash + Eq,
    P: StagedPresentation<M>,
{
    let r = run_transform(m, pres, points, 8, 256).map_err(|e| e.to_string())?;
    if r.verdict != Verdict::Agree || !r.parity_ok || r.growth_violations != 0 {
        return Err(format!(
            "{}: {:?}, parity {}",
            r.presentation, r.verdict, r.parity_ok
        ));
    }
    if r.rows.iter().any(|row| row.truth != Some(row.value)) {
        return Err(format!("{}: a row disagrees", r.presentation));
    }
    Ok(format!(
        "{} at B={} (|T|={}, ξ={})",
        r.presentation, r.budget, r.tree_size, r.xi
    ))
}

fn criterion_8() -> Line {
    let mut done = Vec::new();
    let split = FinitePoset::chain(2)
        .disjoint_union(&FinitePoset::antichain(1))
        .unwrap();
    let cases = [
        (split, PointSet::singleton(2)),
        (FinitePoset::chain(3), PointSet::EMPTY),
        (FinitePoset::chain(3), PointSet::full(3)),
    ];
    for (p, a) in cases {
        let m = FinitePosetModel::new(p.clone(), FiniteBasis::AllOpens, FiniteRelation::WayBelow);
        let pres = match ClopenPresentation::new(&m, a) {
            Ok(pr) => pr,
            Err(e) => return fail(e.to_string()),
        };
        let pts: Vec<usize> = (0..p.len()).collect();
        match transform_case(&m, &pres, &pts) {
            Ok(s) => done.push(s),
            Err(e) => return fail(e),
        }
    }
    let m = CylinderModel::new(3, CylRelation::Containment).unwrap();
    let mut pts = Vec::new();
    for w in all_words(3, 4) {
        for s in 0..3 {
            pts.push(CylPoint::new(w.clone(), vec![s]).unwrap());
        }
    }
    match transform_case(&m, &FirstOnePresentation, &pts) {
        Ok(s) => done.push(format!("{s} on {} points", pts.len())),
        Err(e) => return fail(e),
    }
    pass(done.join("; "))
}

/// Σ-denotation straight from the definition, with heights computed here.
fn oracle_borel(nodes: &BTreeSet<Vec<u64>>, v: &[u64], basis: &[PointSet]) -> PointSet {
    let kids: Vec<&Vec<u64>> = nodes
        .iter()
        .filter(|c| c.len() == v.len() + 1 && c.starts_with(v))
        .collect();
    let open = |n: u64| basis.get(n as usize).copied().unwrap_or(PointSet::EMPTY);
    let height = |u: &[u64]| {
        nodes
            .iter()
            .filter(|c| c.starts_with(u))
            .map(|c| c.len() - u.len())
            .max()
            .unwrap()
    };
    match height(v) {
        0 => v.last().map_or(PointSet::EMPTY, |&n| open(n)),
        1 => kids
            .iter()
            .fold(PointSet::EMPTY, |a, c| a.union(open(*c.last().unwrap()))),
        _ => {
            let mut acc = PointSet::EMPTY;
            for c in kids.iter().filter(|c| c.last().unwrap() % 2 == 0) {
                let mut d = (*c).clone();
                *d.last_mut().unwrap() += 1;
                acc = acc.union(
                    oracle_borel(nodes, c, basis).difference(oracle_borel(nodes, &d, basis)),
                );
            }
            acc
        }
    }
}

fn criterion_9() -> Line {
    // six principal opens on the binary words of length 1 and 2
    let (p, _) = FinitePoset::word_tree(2, 2, false);
    let m = FinitePosetModel::new(p.clone(), FiniteBasis::Principal, FiniteRelation::Inclusion);
    let basis = m.basis_sets().to_vec();
    if basis.len() != 6 {
        return fail(format!("model has {} basic opens", basis.len()));
    }
    let mut cands: Vec<Vec<u64>> = (0..6).map(|a| vec![a]).collect();
    for a in 0..6 {
        for b in 0..6 {
            cands.push(vec![a, b]);
        }
    }
    let (mut codes, mut rejected) = (0usize, 0usize);
    // every node set of at most 4 nodes besides the root
    let mut check = |chosen: &[usize]| -> Result<(), String> {
        let mut nodes: BTreeSet<Vec<u64>> = chosen.iter().map(|&i| cands[i].clone()).collect();
        if nodes
            .iter()
            .any(|v| v.len() == 2 && !nodes.contains(&v[..1]))
        {
            return Ok(());
        }
        nodes.insert(Vec::new());
        let tree = WfTree::new(nodes.iter().cloned()).map_err(|e| e.to_string())?;
        let Ok(code) = BorelCode::new(tree) else {
            rejected += 1;
            return Ok(());
        };
        codes += 1;
        let want = oracle_borel(&nodes, &[], &basis);
        if code.denote_sets(&basis) != want {
            return Err(format!("denote_sets differs on {nodes:?}"));
        }
        for x in 0..p.len() {
            let sigma = code.eval_in(&m, &x, Side::Sigma);
            if sigma != want.contains(x) || code.eval_in(&m, &x, Side::Pi) == sigma {
                return Err(format!("eval differs on {nodes:?} at {x}"));
            }
        }
        Ok(())
    };
    if let Err(e) = each_combination(cands.len(), 4, &mut Vec::new(), 0, &mut check) {
        return fail(e);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut translated = 0;
    while translated < 500 {
        let n = rng.gen_range(1..=6);
        let q = random_poset(&mut rng, n, 0.4);
        let qm =
            FinitePosetModel::new(q.clone(), FiniteBasis::Principal, FiniteRelation::Inclusion);
        let len = rng.gen_range(0..=5);
        let sets: Vec<PointSet> = (0..len)
            .map(|_| q.up_closure(random_subset(&mut rng, n)))
            .collect();
        let code = DiffCode::finite(sets, Polarity::D);
        let perm: Option<Vec<usize>> = rng.gen_bool(0.5).then(|| {
            let mut v: Vec<usize> = (0..len).collect();
            v.shuffle(&mut rng);
            v
        });
        let h = match HausdorffCode::from_diff(&code, qm.basis_sets(), perm.as_deref()) {
            Ok(h) => h,
            Err(e) => return fail(format!("translation {translated}: {e}")),
        };
        for x in 0..n {
            if h.eval_in(&qm, &x) != code.eval_at(x) || code.eval_at(x) != oracle_eval(&code, x) {
                return fail(format!("translation {translated} differs at {x}"));
            }
        }
        translated += 1;
    }
    pass(format!("{codes} Borel codes of rank ≤ 2 ({rejected} unpaired trees rejected), 500 Hausdorff translations"))
}

fn each_combination<F: FnMut(&[usize]) -> Result<(), String>>(
    n: usize,
    max: usize,
    pick: &mut Vec<usize>,
    start: usize,
    f: &mut F,
) -> Result<(), String> {
    f(pick)?;
    if pick.len() == max {
        return Ok(());
    }
    for i in start..n {
        pick.push(i);
        each_combination(n, max, pick, i + 1, f)?;
        pick.pop();
    }
    Ok(())
}

fn main() -> ExitCode {
    type Criterion = (u8, &'static str, fn() -> Line);
    let criteria: [Criterion; 9] = [
        (1, "three-way classifier agreement", criterion_1),
        (2, "difference-algebra identities", criterion_2),
        (3, "normalization and padding soundness", criterion_3),
        (4, "ambiguity audit", criterion_4),
        (5, "approximation-relation axioms", criterion_5),
        (6, "game soundness", criterion_6),
        (7, "Baire witness", criterion_7),
        (8, "effective transform", criterion_8),
        (9, "code evaluators", criterion_9),
    ];
    let started = Instant::now();
    let results: Vec<(Line, f64)> = std::thread::scope(|s| {
        let handles: Vec<_> = criteria
            .iter()
            .map(|&(_, _, f)| {
                s.spawn(move || {
                    let t = Instant::now();
                    (f(), t.elapsed().as_secs_f64())
                })
            })
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("criterion panicked"))
            .collect()
    });
    let mut unexpected = 0;
    for ((id, name, _), (line, secs)) in criteria.iter().zip(&results) {
        let status = if line.pass { "PASS" } else { "FAIL" };
        let expected = if *id == 4 {
            criterion_4_expected(line)
        } else {
            line.pass
        };
        let note = if *id == 4 && expected {
            " [expected: the successor-level identity does not hold without a least element]"
        } else {
            ""
        };
        println!(
            "{status} criterion {id} ({name}, {secs:.1}s): {}{note}",
            line.detail
        );
        if !expected {
            unexpected += 1;
        }
    }
    println!(
        "acceptance finished in {:.1}s",
        started.elapsed().as_secs_f64()
    );
    if unexpected == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{unexpected} criteria ended differently than expected");
        ExitCode::FAILURE
    }
}
