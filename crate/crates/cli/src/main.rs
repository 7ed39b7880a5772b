//! `hier`: command line front end for the hierarchy library.

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

mod commands;

#[derive(Parser, Debug)]
#[command(
    name = "hier",
    version,
    about = "Difference hierarchies on finite posets and symbolic spaces"
)]
struct Cli {
    /// Also write the report to this file.
    #[arg(long, global = true)]
    json_out: Option<PathBuf>,
    /// Include wall-clock timing in the report (makes output nondeterministic).
    #[arg(long, global = true)]
    timing: bool,
    #[command(subcommand)]
    cmd: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Σ/Π levels of a subset of a finite poset.
    Classify(ClassifyArgs),
    /// Residue chain and the Hausdorff decomposition it yields.
    Residues(PosetSetArgs),
    /// Alternating chains and trees.
    Alt(AltArgs),
    /// Choquet or Banach–Mazur plays against the relation strategy.
    Play(PlayArgs),
    /// Baire witnesses on a cylinder model.
    Baire(BaireArgs),
    /// Evaluate a Borel, Hausdorff or difference code at a point.
    EvalCode(EvalArgs),
    /// Turn a staged presentation into a Hausdorff code and verify it.
    Transform(TransformArgs),
    /// Exhaustive property suites over small posets.
    Audit(AuditArgs),
    /// Seeded random inputs.
    Gen(GenArgs),
}

#[derive(Args, Debug)]
pub struct PosetSetArgs {
    /// Poset JSON `{"n":..,"cover":[[a,b],..]}`: a file, `@file` or inline.
    #[arg(long)]
    poset: String,
    /// Subset such as `1,2` or `{1,2}`.
    #[arg(long)]
    set: String,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Method {
    Residues,
    Alt,
    Brute,
    All,
}

#[derive(Args, Debug)]
pub struct ClassifyArgs {
    #[command(flatten)]
    target: PosetSetArgs,
    #[arg(long, value_enum, default_value = "all")]
    method: Method,
    /// State budget of the brute-force search.
    #[arg(long)]
    budget: Option<usize>,
}

#[derive(Args, Debug)]
pub struct AltArgs {
    #[command(flatten)]
    target: PosetSetArgs,
    /// Also emit the full alternating tree rooted at this point.
    #[arg(long)]
    root: Option<usize>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Game {
    Choquet,
    BanachMazur,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum EmptyKind {
    Random,
    Deepest,
}

#[derive(Args, Debug)]
pub struct PlayArgs {
    /// Model JSON, e.g. `{"kind":"pinf"}`.
    #[arg(long)]
    model: String,
    #[arg(long, value_enum, default_value = "choquet")]
    game: Game,
    #[arg(long, default_value_t = 20)]
    rounds: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Number of plays; a single play also emits its transcript.
    #[arg(long, default_value_t = 1)]
    plays: usize,
    #[arg(long, value_enum, default_value = "random")]
    empty: EmptyKind,
}

#[derive(Args, Debug)]
pub struct BaireArgs {
    /// Cylinder model JSON.
    #[arg(long)]
    model: String,
    /// Instance JSON `{"target":[..],"constraints":[{"u":..,"g":..}]}`;
    /// without it, seeded random instances are generated.
    #[arg(long)]
    instance: Option<String>,
    #[arg(long, default_value_t = 1)]
    instances: usize,
    #[arg(long, default_value_t = 3)]
    constraints: usize,
    #[arg(long, default_value_t = 6)]
    rounds: usize,
    #[arg(long, default_value_t = 10_000)]
    budget: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum SideArg {
    Sigma,
    Pi,
}

#[derive(Args, Debug)]
pub struct EvalArgs {
    /// Model JSON: `pn`, `pinf`, `clauses`, `cylinder` or `poset`.
    #[arg(long)]
    model: String,
    /// Borel code JSON `{"nodes":[..]}`.
    #[arg(long, conflicts_with_all = ["hausdorff", "diff"])]
    borel: Option<String>,
    /// Hausdorff code JSON `{"order":..,"parity_set":..,"trees":..}`.
    #[arg(long, conflicts_with = "diff")]
    hausdorff: Option<String>,
    /// Difference code JSON `{"alpha":..,"entries":..}` over the model's opens.
    #[arg(long)]
    diff: Option<String>,
    /// Point JSON; may be repeated.
    #[arg(long, required = true)]
    point: Vec<String>,
    #[arg(long, value_enum, default_value = "sigma")]
    side: SideArg,
}

#[derive(Args, Debug)]
pub struct TransformArgs {
    /// Cylinder or finite poset model JSON.
    #[arg(long)]
    model: String,
    /// `first-one`, or a row-list JSON `{"one":[[..]],"zero":[[..]]}`.
    #[arg(long)]
    presentation: Option<String>,
    /// On a finite poset: present this clopen set.
    #[arg(long, conflicts_with = "presentation")]
    set: Option<String>,
    /// Largest stage budget tried.
    #[arg(long, default_value_t = 256)]
    budget: usize,
    /// First stage budget; doubled until the answers settle.
    #[arg(long, default_value_t = 8)]
    start: usize,
    /// Cylinder test points: prefixes of this length with constant tails.
    #[arg(long, default_value_t = 2)]
    depth: usize,
    /// Emit the explicit code when the tree has at most this many nodes.
    #[arg(long, default_value_t = 2048)]
    emit_limit: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Suite {
    Classifiers,
    Ambiguity,
    All,
}

#[derive(Args, Debug)]
pub struct AuditArgs {
    /// Run over every poset with at most this many points.
    #[arg(long, default_value_t = 3)]
    exhaustive: usize,
    #[arg(long, value_enum, default_value = "all")]
    suite: Suite,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum GenKind {
    Poset,
    Set,
    BaireInstance,
    Code,
}

#[derive(Args, Debug)]
pub struct GenArgs {
    #[arg(value_enum)]
    kind: GenKind,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Number of points (poset, set, code) or alphabet size (baire-instance).
    #[arg(long, default_value_t = 5)]
    n: usize,
    #[arg(long, default_value_t = 0.4)]
    density: f64,
}

#[derive(Debug)]
pub enum CliError {
    Validation(String),
    Budget(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Validation(_) => 1,
            CliError::Budget(_) => 2,
        }
    }

    fn to_json(&self) -> Value {
        let (kind, msg) = match self {
            CliError::Validation(m) => ("validation", m),
            CliError::Budget(m) => ("budget", m),
        };
        json!({ "kind": kind, "message": msg })
    }
}

pub fn invalid<E: std::fmt::Display>(e: E) -> CliError {
    CliError::Validation(e.to_string())
}

/// Collects every input text read, for the report digest.
#[derive(Default)]
pub struct Inputs {
    hasher: Sha256,
}

impl Inputs {
    /// Reads `@file`, an existing file path, or takes the argument as is.
    pub fn load(&mut self, arg: &str) -> Result<String, CliError> {
        let text = if let Some(path) = arg.strip_prefix('@') {
            std::fs::read_to_string(path).map_err(|e| invalid(format!("{path}: {e}")))?
        } else if !arg.trim_start().starts_with(['{', '[']) && std::path::Path::new(arg).is_file() {
            std::fs::read_to_string(arg).map_err(|e| invalid(format!("{arg}: {e}")))?
        } else {
            arg.to_string()
        };
        self.hasher.update(text.as_bytes());
        self.hasher.update([0u8]);
        Ok(text)
    }

    fn digest(self) -> String {
        hex::encode(self.hasher.finalize())
    }
}

/// Result of a subcommand: its output and, when the run hit a limit
/// without failing outright, the error to exit with.
pub struct Outcome {
    pub output: Value,
    pub seed: Option<u64>,
    pub status: Option<CliError>,
}

impl Outcome {
    pub fn ok<T: Serialize>(output: T) -> Result<Outcome, CliError> {
        Ok(Outcome {
            output: serde_json::to_value(output).map_err(invalid)?,
            seed: None,
            status: None,
        })
    }

    pub fn seeded(mut self, seed: u64) -> Self {
        self.seed = Some(seed);
        self
    }
}

#[derive(Serialize)]
struct RunReport {
    command: String,
    args: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    seed: Option<u64>,
    input_sha256: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    output: Option<Value>,
    #[serde(skip_serializing_if = "Option::is_none")]
    error: Option<Value>,
    #[serde(skip_serializing_if = "Option::is_none")]
    timing_ms: Option<u128>,
}

fn command_name(c: &Command) -> &'static str {
    match c {
        Command::Classify(_) => "classify",
        Command::Residues(_) => "residues",
        Command::Alt(_) => "alt",
        Command::Play(_) => "play",
        Command::Baire(_) => "baire",
        Command::EvalCode(_) => "eval-code",
        Command::Transform(_) => "transform",
        Command::Audit(_) => "audit",
        Command::Gen(_) => "gen",
    }
}

fn main() -> ExitCode {
    let argv: Vec<String> = std::env::args().collect();
    let cli = match Cli::try_parse_from(&argv) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = write!(std::io::stdout(), "{e}");
                return ExitCode::SUCCESS;
            }
            let err = CliError::Validation(e.render().to_string().trim().to_string());
            let _ = writeln!(std::io::stdout(), "{}", json!({ "error": err.to_json() }));
            return ExitCode::from(1);
        }
    };
    let started = Instant::now();
    let mut inputs = Inputs::default();
    let result = match &cli.cmd {
        Command::Classify(a) => commands::classify(a, &mut inputs),
        Command::Residues(a) => commands::residues(a, &mut inputs),
        Command::Alt(a) => commands::alt(a, &mut inputs),
        Command::Play(a) => commands::play(a, &mut inputs),
        Command::Baire(a) => commands::baire(a, &mut inputs),
        Command::EvalCode(a) => commands::eval_code(a, &mut inputs),
        Command::Transform(a) => commands::transform(a, &mut inputs),
        Command::Audit(a) => commands::audit(a),
        Command::Gen(a) => commands::gen(a),
    };
    let (output, seed, err) = match result {
        Ok(o) => (Some(o.output), o.seed, o.status),
        Err(e) => (None, None, Some(e)),
    };
    let report = RunReport {
        command: command_name(&cli.cmd).to_string(),
        args: argv.into_iter().skip(1).collect(),
        seed,
        input_sha256: inputs.digest(),
        output,
        error: err.as_ref().map(CliError::to_json),
        timing_ms: cli.timing.then(|| started.elapsed().as_millis()),
    };
    let text = serde_json::to_string_pretty(&report).expect("report serializes");
    // a closed pipe is not an error of the run
    let _ = writeln!(std::io::stdout(), "{text}");
    if let Some(path) = &cli.json_out {
        if let Err(e) = std::fs::write(path, format!("{text}\n")) {
            eprintln!("cannot write {}: {e}", path.display());
            return ExitCode::from(1);
        }
    }
    match err {
        Some(e) => {
            if let Some(Value::String(m)) = e.to_json().get("message") {
                eprintln!("error: {m}");
            }
            ExitCode::from(e.code())
        }
        None => ExitCode::SUCCESS,
    }
}
