use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::de::DeserializeOwned;
use serde::Serialize;
use serde_json::{json, Value};

use hier_core::alt_trees::{
    alt_chain_lengths, alt_chain_witness, alt_levels, alternating_tree, ambiguity_audit,
    diff_code_from_trees, AuditStatement, LabeledAltTree,
};
use hier_core::diff_hierarchy::{
    level_bruteforce, DiffCode, DiffError, Levels, Polarity, DEFAULT_STATE_BUDGET,
};
use hier_core::effective_codes::transform::{run_transform, AltTreeEngine, Verdict};
use hier_core::effective_codes::{
    BorelCode, ClopenPresentation, FirstOnePresentation, HausdorffCode, RowListPresentation, Side,
};
use hier_core::finite_space::{all_posets, random_poset, random_subset, FinitePoset, PointSet};
use hier_core::games::{
    play as play_game, BmAdapter, DeepestDescent, GameKind, Outcome as PlayOutcome, RandomEmpty,
    Transcript,
};
use hier_core::games::{stationary_from_relation, EmptyStrategy};

use hier_core::residues::{hausdorff_decompose, residue_levels, residue_sequence};
use hier_core::space_models::baire::{baire_witness, BaireErrorKind, CylInstance};
use hier_core::space_models::cylinder::all_words;
use hier_core::space_models::spec::ModelSpec;
use hier_core::space_models::{
    ClauseModel, Clopen, CylPoint, CylinderModel, FinSet, FiniteBasis, FinitePosetModel,
    FiniteRelation, MoveSampler, PInfinityModel, PowersetModel, SpaceModel, SymbolicSet,
    DEFAULT_SEARCH_BOUND,
};

use crate::{
    invalid, AltArgs, AuditArgs, BaireArgs, ClassifyArgs, CliError, EmptyKind, EvalArgs, Game,
    GenArgs, GenKind, Inputs, Method, Outcome, PlayArgs, PosetSetArgs, SideArg, Suite,
    TransformArgs,
};

/// Per-model parsing of points and opens read from JSON.
trait CliModel: SpaceModel {
    fn parse_point(&self, s: &str) -> Result<Self::Point, CliError>;
    fn canon_open(&self, o: Self::Open) -> Result<Self::Open, CliError>;
}

fn from_json<T: DeserializeOwned>(s: &str) -> Result<T, CliError> {
    serde_json::from_str(s).map_err(invalid)
}

/// A symbolic set, or a plain array for a finite one.
fn symbolic(s: &str) -> Result<SymbolicSet, CliError> {
    match serde_json::from_str::<FinSet>(s) {
        Ok(f) => Ok(SymbolicSet::finite(f)),
        Err(_) => from_json(s),
    }
}

impl CliModel for PowersetModel {
    fn parse_point(&self, s: &str) -> Result<SymbolicSet, CliError> {
        symbolic(s)
    }
    fn canon_open(&self, o: FinSet) -> Result<FinSet, CliError> {
        Ok(o)
    }
}

impl CliModel for PInfinityModel {
    fn parse_point(&self, s: &str) -> Result<SymbolicSet, CliError> {
        symbolic(s)
    }
    fn canon_open(&self, o: FinSet) -> Result<FinSet, CliError> {
        Ok(o)
    }
}

impl CliModel for ClauseModel {
    fn parse_point(&self, s: &str) -> Result<SymbolicSet, CliError> {
        symbolic(s)
    }
    fn canon_open(&self, o: FinSet) -> Result<FinSet, CliError> {
        Ok(o)
    }
}

impl CliModel for CylinderModel {
    fn parse_point(&self, s: &str) -> Result<CylPoint, CliError> {
        let x: CylPoint = from_json(s)?;
        if !self.valid_point(&x) {
            return Err(invalid(format!(
                "point {s} is not a sequence over 0..{}",
                self.alphabet
            )));
        }
        Ok(x)
    }
    fn canon_open(&self, o: Clopen) -> Result<Clopen, CliError> {
        o.canonical(self.alphabet).map_err(invalid)
    }
}

impl CliModel for FinitePosetModel {
    fn parse_point(&self, s: &str) -> Result<usize, CliError> {
        let x: usize = from_json(s)?;
        if x >= self.poset().len() {
            return Err(invalid(format!("point {x} is not in the poset")));
        }
        Ok(x)
    }
    fn canon_open(&self, o: PointSet) -> Result<PointSet, CliError> {
        if !o.is_subset(self.poset().carrier()) || !self.poset().is_open(o) {
            return Err(invalid(format!("{o} is not an open set")));
        }
        Ok(o)
    }
}

enum AnyModel {
    Pn(PowersetModel),
    Pinf(PInfinityModel),
    Clauses(ClauseModel),
    Cylinder(CylinderModel),
    Poset(FinitePosetModel),
}

macro_rules! with_model {
    ($m:expr, $v:ident => $body:expr) => {
        match $m {
            AnyModel::Pn($v) => $body,
            AnyModel::Pinf($v) => $body,
            AnyModel::Clauses($v) => $body,
            AnyModel::Cylinder($v) => $body,
            AnyModel::Poset($v) => $body,
        }
    };
}

fn load_model(arg: &str, inputs: &mut Inputs) -> Result<AnyModel, CliError> {
    let spec = ModelSpec::from_json(&inputs.load(arg)?).map_err(invalid)?;
    Ok(match &spec {
        ModelSpec::Pn {} => AnyModel::Pn(PowersetModel),
        ModelSpec::Pinf {} => AnyModel::Pinf(PInfinityModel),
        ModelSpec::Clauses { .. } => AnyModel::Clauses(spec.clause_model().expect("clauses")),
        ModelSpec::Cylinder { .. } => AnyModel::Cylinder(spec.cylinder_model().expect("validated")),
        ModelSpec::Poset { .. } => AnyModel::Poset(spec.poset_model().expect("validated")),
    })
}

fn load_poset(arg: &str, inputs: &mut Inputs) -> Result<FinitePoset, CliError> {
    FinitePoset::from_json(&inputs.load(arg)?).map_err(invalid)
}

fn load_target(a: &PosetSetArgs, inputs: &mut Inputs) -> Result<(FinitePoset, PointSet), CliError> {
    let p = load_poset(&a.poset, inputs)?;
    let s: PointSet = a.set.parse().map_err(invalid)?;
    if !s.is_subset(p.carrier()) {
        return Err(invalid(format!(
            "{s} is not a subset of the {} points",
            p.len()
        )));
    }
    Ok((p, s))
}

fn diff_err(e: DiffError) -> CliError {
    match e {
        DiffError::Budget(_) => CliError::Budget(e.to_string()),
        e => invalid(e),
    }
}

pub fn classify(a: &ClassifyArgs, inputs: &mut Inputs) -> Result<Outcome, CliError> {
    let (p, s) = load_target(&a.target, inputs)?;
    let budget = a.budget.unwrap_or(DEFAULT_STATE_BUDGET);
    let mut levels = serde_json::Map::new();
    let mut found: Vec<Levels> = Vec::new();
    let mut witness = Value::Null;
    if matches!(a.method, Method::Residues | Method::All) {
        let l = residue_levels(&p, s).map_err(invalid)?;
        levels.insert("residues".into(), json!(l));
        found.push(l);
    }
    if matches!(a.method, Method::Alt | Method::All) {
        let l = alt_levels(&p, s);
        levels.insert("alt".into(), json!(l));
        found.push(l);
    }
    if matches!(a.method, Method::Brute | Method::All) {
        let (l, sc, pc) = level_bruteforce(&p, s, budget).map_err(diff_err)?;
        levels.insert("brute".into(), json!(l));
        witness = json!({ "sigma_code": sc, "pi_code": pc });
        found.push(l);
    }
    let agree = found.windows(2).all(|w| w[0] == w[1]);
    let out = json!({
        "set": s.to_string(),
        "sigma": found[0].sigma,
        "pi": found[0].pi,
        "agree": agree,
        "levels": levels,
        "witness": witness,
    });
    let mut o = Outcome::ok(out)?;
    if !agree {
        o.status = Some(invalid("classifiers disagree"));
    }
    Ok(o)
}

pub fn residues(a: &PosetSetArgs, inputs: &mut Inputs) -> Result<Outcome, CliError> {
    let (p, s) = load_target(a, inputs)?;
    let chain = residue_sequence(&p, s);
    let dec = hausdorff_decompose(&p, s).map_err(invalid)?;
    let levels = residue_levels(&p, s).map_err(invalid)?;
    Outcome::ok(json!({
        "set": s.to_string(),
        "chain": chain,
        "raw": dec.raw,
        "trimmed": dec.trimmed,
        "levels": levels,
    }))
}

fn tree_json(t: &LabeledAltTree) -> Value {
    let nodes: Vec<Value> = t
        .labels
        .iter()
        .map(|(v, l)| json!({ "node": v, "label": l }))
        .collect();
    json!({ "root_side": t.root_side, "rank": t.tree.rank(), "nodes": nodes })
}

pub fn alt(a: &AltArgs, inputs: &mut Inputs) -> Result<Outcome, CliError> {
    let (p, s) = load_target(&a.target, inputs)?;
    let tree = match a.root {
        Some(b) if b >= p.len() => return Err(invalid(format!("root {b} is not in the poset"))),
        Some(b) => tree_json(&alternating_tree(&p, s, b)),
        None => Value::Null,
    };
    Outcome::ok(json!({
        "set": s.to_string(),
        "levels": alt_levels(&p, s),
        "chain_lengths": alt_chain_lengths(&p, s),
        "witness_in": alt_chain_witness(&p, s, true),
        "witness_out": alt_chain_witness(&p, s, false),
        "code": diff_code_from_trees(&p, s),
        "tree": tree,
    }))
}

fn play_on<M>(m: &M, a: &PlayArgs) -> Result<Outcome, CliError>
where
    M: MoveSampler,
{
    let kind = match a.game {
        Game::Choquet => GameKind::Choquet,
        Game::BanachMazur => GameKind::BanachMazur,
    };
    let mut counts = [0usize; 3];
    let mut last: Option<Transcript<M::Open, M::Point>> = None;
    for k in 0..a.plays {
        let t = match a.empty {
            EmptyKind::Random => play_one(
                m,
                kind,
                &mut RandomEmpty::seeded(a.seed.wrapping_add(k as u64)),
                a.rounds,
            ),
            EmptyKind::Deepest => play_one(
                m,
                kind,
                &mut DeepestDescent {
                    start: k,
                    bound: DEFAULT_SEARCH_BOUND,
                },
                a.rounds,
            ),
        };
        counts[match t.outcome {
            PlayOutcome::NonemptyWins => 0,
            PlayOutcome::EmptyWins => 1,
            PlayOutcome::Undecided { .. } => 2,
        }] += 1;
        last = Some(t);
    }
    let transcript = if a.plays == 1 {
        serde_json::to_value(&last).map_err(invalid)?
    } else {
        Value::Null
    };
    let mut o = Outcome::ok(json!({
        "model": m.name(),
        "game": kind,
        "plays": a.plays,
        "rounds": a.rounds,
        "nonempty_wins": counts[0],
        "losses": counts[1],
        "undecided": counts[2],
        "transcript": transcript,
    }))?
    .seeded(a.seed);
    if counts[2] > 0 {
        o.status = Some(CliError::Budget(format!(
            "{} plays undecided after {} rounds",
            counts[2], a.rounds
        )));
    }
    Ok(o)
}

fn play_one<M: SpaceModel, E: EmptyStrategy<M>>(
    m: &M,
    kind: GameKind,
    empty: &mut E,
    rounds: usize,
) -> Transcript<M::Open, M::Point> {
    match kind {
        GameKind::Choquet => play_game(kind, empty, &mut stationary_from_relation(), m, rounds),
        GameKind::BanachMazur => play_game(
            kind,
            empty,
            &mut BmAdapter(stationary_from_relation()),
            m,
            rounds,
        ),
    }
}

pub fn play(a: &PlayArgs, inputs: &mut Inputs) -> Result<Outcome, CliError> {
    if a.plays == 0 {
        return Err(invalid("--plays must be positive"));
    }
    let m = load_model(&a.model, inputs)?;
    with_model!(&m, m => play_on(m, a))
}

pub fn baire(a: &BaireArgs, inputs: &mut Inputs) -> Result<Outcome, CliError> {
    let AnyModel::Cylinder(m) = load_model(&a.model, inputs)? else {
        return Err(invalid("baire runs on cylinder models"));
    };
    let instances: Vec<CylInstance> = match &a.instance {
        Some(arg) => {
            let inst: CylInstance = from_json(&inputs.load(arg)?)?;
            vec![inst.canonical(&m).map_err(invalid)?]
        }
        None => {
            let mut rng = ChaCha8Rng::seed_from_u64(a.seed);
            (0..a.instances)
                .map(|_| CylInstance::random(&mut rng, &m, a.constraints))
                .collect()
        }
    };
    let mut runs = Vec::new();
    let mut status = None;
    for inst in &instances {
        match baire_witness(
            &m,
            &inst.constraints,
            &inst.target,
            None,
            a.rounds,
            a.budget,
        ) {
            Ok(w) => {
                let verified = inst.verify(&m, &w.point);
                if !verified && status.is_none() {
                    status = Some(invalid("witness failed verification"));
                }
                runs.push(json!({ "instance": inst, "witness": w, "verified": verified }));
            }
            Err(f) => {
                if status.is_none() {
                    status = Some(match f.kind {
                        BaireErrorKind::BudgetExceeded => {
                            CliError::Budget(format!("budget of {} steps exceeded", a.budget))
                        }
                        ref k => invalid(format!("{k:?}")),
                    });
                }
                runs.push(json!({ "instance": inst, "failure": f }));
            }
        }
    }
    let mut o = Outcome::ok(json!({ "runs": runs }))?;
    if a.instance.is_none() {
        o = o.seeded(a.seed);
    }
    o.status = status;
    Ok(o)
}

fn eval_on<M>(m: &M, a: &EvalArgs, inputs: &mut Inputs) -> Result<Outcome, CliError>
where
    M: CliModel,
    M::Open: DeserializeOwned,
{
    let points: Vec<M::Point> = a
        .point
        .iter()
        .map(|p| inputs.load(p).and_then(|s| m.parse_point(&s)))
        .collect::<Result<_, _>>()?;
    let side = match a.side {
        SideArg::Sigma => Side::Sigma,
        SideArg::Pi => Side::Pi,
    };
    let (kind, values): (&str, Vec<bool>) = if let Some(b) = &a.borel {
        let c = BorelCode::from_json(&inputs.load(b)?).map_err(invalid)?;
        (
            "borel",
            points.iter().map(|x| c.eval_in(m, x, side)).collect(),
        )
    } else if let Some(h) = &a.hausdorff {
        let c = HausdorffCode::from_json(&inputs.load(h)?).map_err(invalid)?;
        (
            "hausdorff",
            points.iter().map(|x| c.eval_in(m, x)).collect(),
        )
    } else if let Some(d) = &a.diff {
        let raw: DiffCode<M::Open> = from_json(&inputs.load(d)?)?;
        let mut entries = Vec::new();
        for e in raw.entries() {
            entries.push(hier_core::diff_hierarchy::DiffEntry {
                index: e.index.clone(),
                set: m.canon_open(e.set.clone())?,
            });
        }
        let c = DiffCode::new(raw.alpha().clone(), entries, raw.polarity()).map_err(invalid)?;
        (
            "diff",
            points
                .iter()
                .map(|x| c.eval_with(|o| m.contains(o, x)))
                .collect(),
        )
    } else {
        return Err(invalid("one of --borel, --hausdorff or --diff is required"));
    };
    let rows: Vec<Value> = points
        .iter()
        .zip(&values)
        .map(|(x, v)| json!({ "point": x, "value": v }))
        .collect();
    Outcome::ok(json!({ "kind": kind, "results": rows }))
}

pub fn eval_code(a: &EvalArgs, inputs: &mut Inputs) -> Result<Outcome, CliError> {
    let m = load_model(&a.model, inputs)?;
    with_model!(&m, m => eval_on(m, a, inputs))
}

fn transform_report<M, P>(
    m: &M,
    pres: &P,
    points: &[M::Point],
    a: &TransformArgs,
) -> Result<Outcome, CliError>
where
    M: SpaceModel + hier_core::space_models::UnionClosed,
    M::Open: std::hash::Hash + Eq,
    P: hier_core::effective_codes::StagedPresentation<M>,
{
    if a.start < 2 || a.start > a.budget {
        return Err(invalid("need 2 ≤ --start ≤ --budget"));
    }
    let r = run_transform(m, pres, points, a.start, a.budget).map_err(invalid)?;
    let eng = AltTreeEngine::new(m, pres, r.budget).map_err(invalid)?;
    let code = match eng.materialize(a.emit_limit).map_err(invalid)? {
        Some(mat) => serde_json::to_value(&mat.hausdorff).map_err(invalid)?,
        None => Value::Null,
    };
    let status = match &r.verdict {
        Verdict::Agree => None,
        Verdict::Incomplete { budget, .. } => Some(CliError::Budget(format!(
            "answers not settled at budget {budget}"
        ))),
        // wrong answers that survive a doubling still only mean the cap was too low
        Verdict::Mismatch { budget, points } => Some(CliError::Budget(format!(
            "code disagrees on points {points:?} at the budget cap {budget}"
        ))),
    };
    let mut o = Outcome::ok(json!({ "report": r, "code": code }))?;
    o.status = status;
    Ok(o)
}

pub fn transform(a: &TransformArgs, inputs: &mut Inputs) -> Result<Outcome, CliError> {
    match load_model(&a.model, inputs)? {
        AnyModel::Cylinder(m) => {
            if a.depth > 5 {
                return Err(invalid("--depth is limited to 5"));
            }
            let mut points = Vec::new();
            for w in all_words(m.alphabet, a.depth) {
                for s in 0..m.alphabet {
                    points.push(CylPoint::new(w.clone(), vec![s]).map_err(invalid)?);
                }
            }
            match a.presentation.as_deref() {
                Some("first-one") | None => {
                    FirstOnePresentation::check(&m).map_err(invalid)?;
                    transform_report(&m, &FirstOnePresentation, &points, a)
                }
                Some(arg) => {
                    let rows =
                        RowListPresentation::from_json(&inputs.load(arg)?).map_err(invalid)?;
                    rows.validate(&m).map_err(invalid)?;
                    transform_report(&m, &rows, &points, a)
                }
            }
        }
        AnyModel::Poset(m) => {
            let points: Vec<usize> = (0..m.poset().len()).collect();
            match (&a.set, &a.presentation) {
                (Some(s), _) => {
                    let s: PointSet = s.parse().map_err(invalid)?;
                    let pres = ClopenPresentation::new(&m, s).map_err(invalid)?;
                    transform_report(&m, &pres, &points, a)
                }
                (None, Some(arg)) => {
                    let rows =
                        RowListPresentation::from_json(&inputs.load(arg)?).map_err(invalid)?;
                    rows.validate(&m).map_err(invalid)?;
                    transform_report(&m, &rows, &points, a)
                }
                (None, None) => Err(invalid("a poset model needs --set or --presentation")),
            }
        }
        _ => Err(invalid("transform runs on cylinder and poset models")),
    }
}

pub fn audit(a: &AuditArgs) -> Result<Outcome, CliError> {
    if a.exhaustive > 5 {
        return Err(invalid("--exhaustive is limited to 5"));
    }
    let (mut posets, mut subsets) = (0usize, 0usize);
    let mut disagreements = Vec::new();
    let (mut least, mut successor) = (0usize, 0usize);
    let mut exceptions = Vec::new();
    for n in 0..=a.exhaustive {
        for p in all_posets(n) {
            posets += 1;
            if matches!(a.suite, Suite::Classifiers | Suite::All) {
                for bits in 0..(1u64 << n) {
                    subsets += 1;
                    let s = PointSet(bits);
                    let r = residue_levels(&p, s).map_err(invalid)?;
                    let t = alt_levels(&p, s);
                    let (b, _, _) =
                        level_bruteforce(&p, s, DEFAULT_STATE_BUDGET).map_err(diff_err)?;
                    if r != t || t != b {
                        disagreements
                            .push(json!({ "poset": p.to_json_value(), "set": s.to_string() }));
                    }
                }
            }
            if matches!(a.suite, Suite::Ambiguity | Suite::All) {
                let rep = ambiguity_audit(&p, 3).map_err(diff_err)?;
                for c in &rep.checks {
                    match c.statement {
                        AuditStatement::LeastElement => least += c.violations.len(),
                        AuditStatement::Successor if c.n <= 2 => {
                            successor += c.violations.len();
                            for s in &c.violations {
                                if exceptions.len() < 8 {
                                    exceptions.push(json!({ "poset": p.to_json_value(), "set": s.to_string(), "n": c.n }));
                                }
                            }
                        }
                        AuditStatement::Successor => {}
                    }
                }
            }
        }
    }
    let violations = disagreements.len() + least;
    let mut o = Outcome::ok(json!({
        "posets": posets,
        "subsets": subsets,
        "classifier_disagreements": disagreements,
        "least_element_violations": least,
        "violations": violations,
        "successor_level_exceptions": successor,
        "successor_examples": exceptions,
    }))?;
    if violations > 0 {
        o.status = Some(invalid(format!("{violations} violations")));
    }
    Ok(o)
}

fn random_code<R: Rng>(rng: &mut R, p: &FinitePoset) -> DiffCode<PointSet> {
    let len = rng.gen_range(0..=3);
    let mut acc = PointSet::EMPTY;
    let mut sets = Vec::with_capacity(len);
    for _ in 0..len {
        acc = acc.union(p.up_closure(random_subset(rng, p.len())));
        sets.push(acc);
    }
    DiffCode::finite(sets, Polarity::D)
}

pub fn gen(a: &GenArgs) -> Result<Outcome, CliError> {
    let mut rng = ChaCha8Rng::seed_from_u64(a.seed);
    if !(0.0..=1.0).contains(&a.density) {
        return Err(invalid("--density must lie in [0, 1]"));
    }
    let out = match a.kind {
        GenKind::Poset | GenKind::Set | GenKind::Code if a.n > 16 => {
            return Err(invalid("--n is limited to 16"));
        }
        GenKind::Poset => json!(random_poset(&mut rng, a.n, a.density).to_json_value()),
        GenKind::Set => json!(random_subset(&mut rng, a.n).to_string()),
        GenKind::BaireInstance => {
            let k = u8::try_from(a.n).map_err(invalid)?;
            let m = CylinderModel::new(k, hier_core::space_models::CylRelation::Containment)
                .map_err(invalid)?;
            json!(CylInstance::random(&mut rng, &m, 3))
        }
        GenKind::Code => {
            let p = random_poset(&mut rng, a.n, a.density);
            let code = random_code(&mut rng, &p);
            let m =
                FinitePosetModel::new(p.clone(), FiniteBasis::Principal, FiniteRelation::Inclusion);
            let h = HausdorffCode::from_diff(&code, m.basis_sets(), None).map_err(invalid)?;
            json!({
                "model": ModelSpec::Poset { poset: p.to_json_value(), basis: FiniteBasis::Principal, relation: FiniteRelation::Inclusion },
                "diff": code,
                "hausdorff": h,
            })
        }
    };
    Ok(Outcome::ok(out)?.seeded(a.seed))
}

#[allow(dead_code)]
fn assert_serialize<T: Serialize>(_: &T) {}
