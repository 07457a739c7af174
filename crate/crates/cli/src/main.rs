//! `titsweyl`: spectra, rank spaces, Weyl monoids, Tits points, semiring points and
//! zero-pattern oracles of catalog group models.

mod verify;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};
use std::path::PathBuf;
use std::process::ExitCode;
use titsweyl::blueprint::{PresentationJson, RelationJson, DEFAULT_BUDGET};
use titsweyl::oracle::family_for_model;
use titsweyl::{
    builtin_family, closure_check, compare_with_spectrum, from_selector, hom_count, induced_weyl_law, is_point,
    matrix_to_json, model_rank_space, parse_family, parse_matrix, rank_space, realizable_patterns_charts,
    sample_point, spectrum, tits_points, Boolean, Entailment, Error, FieldKind, GroupModel, Integers, Naturals,
    OracleConfig, Presentation, Relation, Semiring, Tropical, ZMod, DEFAULT_CAP,
};

const AFTER_HELP: &str = "\
Models: sl:n, gl:n, sp:2n, so:n, o:2n, torus:r, parabolic:n:flag, unipotent:n:flag,
nstorus, psl2-conj, psl2-adj, const:zN, const:<table.json>, semidirect:<data.json>,
or pres:<presentation.json> for a bare presentation (spec, rank-space and dot only).

Exit status: 0 on success, 1 on a computation error or failed check, 2 on a usage error.
Errors are printed as JSON objects {\"error\": {\"kind\", \"message\"}} on standard output.
Worker threads: RAYON_NUM_THREADS.";

#[derive(Parser, Debug)]
#[command(name = "titsweyl", version, about = "Finite blue schemes and Tits-Weyl models over F1", after_help = AFTER_HELP)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
    /// Maximum number of generators for prime enumeration.
    #[arg(long, global = true, default_value_t = DEFAULT_CAP)]
    cap: usize,
    /// Rewrite steps for relation entailment.
    #[arg(long, global = true, default_value_t = DEFAULT_BUDGET)]
    budget: usize,
    /// Seed for every randomized computation.
    #[arg(long, global = true, default_value_t = 0x5eed)]
    seed: u64,
    /// Oracle samples per field per locus [default: 2000].
    #[arg(long, global = true)]
    samples: Option<usize>,
    /// Pretty-print JSON output.
    #[arg(long, global = true)]
    json_pretty: bool,
}

#[derive(Args, Debug, Clone)]
struct ModelArg {
    /// Model selector.
    #[arg(value_name = "MODEL")]
    model: Option<String>,
    /// Model selector, as a flag.
    #[arg(long = "model", value_name = "MODEL", conflicts_with = "model")]
    model_flag: Option<String>,
}

impl ModelArg {
    fn get(&self) -> Result<&str, CliError> {
        self.model
            .as_deref()
            .or(self.model_flag.as_deref())
            .ok_or_else(|| CliError::usage("missing model selector"))
    }
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Spectrum: prime ideals and their inclusion order.
    Spec {
        #[command(flatten)]
        model: ModelArg,
        /// Also decide a relation, given as {"lhs": [...], "rhs": [...]} JSON, within --budget.
        #[arg(long, value_name = "RELATION_JSON")]
        entails: Option<String>,
    },
    /// Rank space, with the Weyl table when the law descends.
    RankSpace {
        #[command(flatten)]
        model: ModelArg,
    },
    /// Weyl monoid multiplication table.
    Weyl {
        #[command(flatten)]
        model: ModelArg,
    },
    /// Tits points over F_{1^m}.
    TitsPoints {
        #[command(flatten)]
        model: ModelArg,
        /// Coefficient order, 1 or 2.
        #[arg(long, default_value_t = 1)]
        m: u8,
    },
    /// Matrix points over a semiring.
    Points {
        #[command(flatten)]
        model: ModelArg,
        /// naturals, b1, tropical, integers or z/N.
        #[arg(long, default_value = "naturals")]
        semiring: String,
        /// Decide whether a matrix (row-major JSON entry list) is a point.
        #[arg(long, value_name = "MATRIX_JSON")]
        check: Option<String>,
        /// Count all points over a finite semiring.
        #[arg(long, conflicts_with = "check")]
        count: bool,
        /// Largest number of assignments scanned by --count.
        #[arg(long, default_value_t = 1 << 20)]
        bound: u64,
        /// Sampled pairs for the closure check.
        #[arg(long, default_value_t = 200)]
        pairs: usize,
    },
    /// Realizable zero patterns of a parametrized family.
    Oracle {
        /// Model with a built-in family (sl:2, psl2-conj, psl2-adj).
        #[arg(value_name = "MODEL")]
        model: Option<String>,
        /// Family file; compared with MODEL's spectrum when both are given.
        #[arg(long, value_name = "FILE")]
        family: Option<PathBuf>,
        /// Sampling fields, e.g. Q,F2,F3,F4,F5.
        #[arg(long, value_delimiter = ',')]
        fields: Option<Vec<String>>,
    },
    /// Verification suites.
    Verify {
        /// Suite to run.
        suite: Suite,
        /// Restrict the properties suite to these models (an empty list runs nothing).
        #[arg(long, value_delimiter = ',', num_args = 0..)]
        models: Option<Vec<String>>,
        /// Include slow checks (SO_5).
        #[arg(long)]
        full: bool,
    },
    /// Hasse diagram of the spectrum in DOT.
    Dot {
        #[command(flatten)]
        model: ModelArg,
    },
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum Suite {
    #[value(name = "paper-counts")]
    GoldenCounts,
    Properties,
    Oracle,
}

/// An error with its exit status.
#[derive(Debug)]
struct CliError {
    kind: &'static str,
    message: String,
    status: u8,
}

impl CliError {
    fn usage(msg: impl Into<String>) -> Self {
        CliError { kind: "usage", message: msg.into(), status: 2 }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let (kind, status) = match &e {
            Error::TooManyGenerators { .. } => ("too_many_generators", 1),
            Error::CapExceeded { .. } => ("cap_exceeded", 1),
            Error::Invalid(_) => ("invalid", 1),
            Error::Unsupported(_) => ("unsupported", 1),
            Error::NotUnit(_) => ("not_unit", 1),
            Error::Undecidable { .. } => ("undecidable", 1),
            Error::LawDoesNotDescend { .. } => ("law_does_not_descend", 1),
            Error::DuplicatePattern(_) => ("duplicate_pattern", 1),
            Error::Parse { .. } => ("parse", 2),
            Error::MissingAux(_) => ("missing_aux", 1),
            Error::Eval(_) => ("eval", 1),
            Error::UnknownModel(_) => ("unknown_model", 2),
        };
        CliError { kind, message: e.to_string(), status }
    }
}

type CliResult<T> = Result<T, CliError>;

/// Output of a command: JSON or raw text, and whether it counts as success.
enum Output {
    Json(Value, bool),
    Text(String),
}

enum Target {
    Model(Box<GroupModel>),
    Bare(Presentation),
}

impl Target {
    fn presentation(&self) -> &Presentation {
        match self {
            Target::Model(g) => &g.presentation,
            Target::Bare(p) => p,
        }
    }

    fn name(&self, sel: &str) -> String {
        match self {
            Target::Model(g) => g.name.clone(),
            Target::Bare(_) => sel.to_string(),
        }
    }

    fn model(self) -> CliResult<GroupModel> {
        match self {
            Target::Model(g) => Ok(*g),
            Target::Bare(_) => Err(CliError::usage("this verb needs a group model, not a bare presentation")),
        }
    }
}

fn load(sel: &str) -> CliResult<Target> {
    if let Some(path) = sel.strip_prefix("pres:") {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::usage(format!("{path}: {e}")))?;
        let j: PresentationJson =
            serde_json::from_str(&text).map_err(|e| CliError::usage(format!("{path}: {e}")))?;
        return Ok(Target::Bare(Presentation::from_json(&j)?));
    }
    Ok(Target::Model(Box::new(from_selector(sel)?)))
}

fn parse_json(text: &str, what: &str) -> CliResult<Value> {
    serde_json::from_str(text).map_err(|e| CliError::usage(format!("{what}: {e}")))
}

fn run(cli: &Cli) -> CliResult<Output> {
    match &cli.cmd {
        Cmd::Spec { model, entails } => {
            let sel = model.get()?;
            let t = load(sel)?;
            let b = t.presentation();
            let s = spectrum(b, cli.cap)?;
            let mut out = s.to_json();
            out["model"] = json!(t.name(sel));
            out["count"] = json!(s.points.len());
            out["relations"] = json!(b.relations.iter().map(|r| r.render(&b.names)).collect::<Vec<_>>());
            if let Some(r) = entails {
                let rj: RelationJson = serde_json::from_value(parse_json(r, "relation")?)
                    .map_err(|e| CliError::usage(format!("relation: {e}")))?;
                let rel = relation_from_json(b, &rj)?;
                let verdict = match b.relation_entailed(&rel, cli.budget) {
                    Entailment::Yes => "yes",
                    Entailment::Unknown => "unknown",
                };
                out["entailment"] = json!({"relation": rel.render(&b.names), "budget": cli.budget, "result": verdict});
            }
            Ok(Output::Json(out, true))
        }
        Cmd::RankSpace { model } => {
            let sel = model.get()?;
            match load(sel)? {
                Target::Model(g) => {
                    let rs = model_rank_space(&g, cli.cap)?;
                    let mut out = rs.to_json();
                    out["model"] = json!(g.name);
                    match induced_weyl_law(&g, &rs) {
                        Ok(w) => out["weyl_table"] = json!(w.table),
                        Err(e) => out["weyl_error"] = json!(e.to_string()),
                    }
                    Ok(Output::Json(out, true))
                }
                Target::Bare(b) => {
                    let rs = rank_space(&b, &spectrum(&b, cli.cap)?)?;
                    let mut out = rs.to_json();
                    out["model"] = json!(sel);
                    Ok(Output::Json(out, true))
                }
            }
        }
        Cmd::Weyl { model } => {
            let g = load(model.get()?)?.model()?;
            let rs = model_rank_space(&g, cli.cap)?;
            let w = induced_weyl_law(&g, &rs)?;
            let mut out = w.to_json();
            out["model"] = json!(g.name);
            Ok(Output::Json(out, true))
        }
        Cmd::TitsPoints { model, m } => {
            let g = load(model.get()?)?.model()?;
            let rs = model_rank_space(&g, cli.cap)?;
            let w = induced_weyl_law(&g, &rs)?;
            let tp = tits_points(&g, &rs, &w, *m)?;
            let mut out = tp.to_json(&w);
            out["model"] = json!(g.name);
            Ok(Output::Json(out, true))
        }
        Cmd::Points { model, semiring, check, count, bound, pairs } => {
            let g = load(model.get()?)?.model()?;
            let opts = PointsOpts { check: check.as_deref(), count: *count, bound: *bound, pairs: *pairs, seed: cli.seed };
            let out = match semiring.trim().to_ascii_lowercase().as_str() {
                "naturals" | "n" => points(&g, &Naturals, &opts),
                "b1" | "boolean" => points(&g, &Boolean, &opts),
                "tropical" | "min-plus" => points(&g, &Tropical, &opts),
                "integers" | "z" => points(&g, &Integers, &opts),
                other => {
                    let n = other
                        .strip_prefix("z/")
                        .or_else(|| other.strip_prefix("zmod:"))
                        .and_then(|n| n.parse::<u64>().ok())
                        .filter(|&n| n >= 2)
                        .ok_or_else(|| CliError::usage(format!("unknown semiring {other}")))?;
                    points(&g, &ZMod(n), &opts)
                }
            }?;
            Ok(Output::Json(out, true))
        }
        Cmd::Oracle { model, family, fields } => {
            let mut cfg = OracleConfig { seed: cli.seed, ..OracleConfig::default() };
            if let Some(s) = cli.samples {
                if s == 0 {
                    return Err(CliError::usage("--samples must be positive"));
                }
                cfg.samples = s;
            }
            if let Some(fs) = fields {
                cfg.fields = fs.iter().map(|f| FieldKind::parse(f)).collect::<Result<_, _>>().map_err(|e| CliError::usage(e.to_string()))?;
            }
            let charts = match (family, model) {
                (Some(path), _) => {
                    let text = std::fs::read_to_string(path).map_err(|e| CliError::usage(format!("{}: {e}", path.display())))?;
                    vec![parse_family(&text)?]
                }
                (None, Some(m)) => {
                    let name = family_for_model(m).ok_or_else(|| CliError::usage(format!("no built-in family for {m}; pass --family")))?;
                    builtin_family(name).expect("built-in family exists")
                }
                (None, None) => return Err(CliError::usage("give a MODEL or --family")),
            };
            let report = realizable_patterns_charts(&charts, &cfg);
            let mut out = json!({"report": report.to_json()});
            if let Some(m) = model {
                let g = load(m)?.model()?;
                let s = spectrum(&g.presentation, cli.cap)?;
                let cmp = compare_with_spectrum(&g, &s, &report)?;
                out["model"] = json!(g.name);
                out["agrees"] = json!(cmp.agrees());
                out["comparison"] = serde_json::to_value(&cmp).expect("serializable");
            }
            Ok(Output::Json(out, true))
        }
        Cmd::Verify { suite, models, full } => {
            let checks = match suite {
                Suite::GoldenCounts => verify::golden_counts(cli.cap, *full)?,
                Suite::Properties => verify::properties(cli.cap, cli.budget, cli.seed, models.as_deref())?,
                Suite::Oracle => verify::oracle(cli.cap, cli.seed, cli.samples)?,
            };
            let passed = checks.iter().all(|c| c.pass);
            let name = suite.to_possible_value().expect("named").get_name().to_string();
            Ok(Output::Json(json!({"suite": name, "passed": passed, "checks": checks}), passed))
        }
        Cmd::Dot { model } => {
            let t = load(model.get()?)?;
            Ok(Output::Text(spectrum(t.presentation(), cli.cap)?.to_dot()))
        }
    }
}

fn relation_from_json(b: &Presentation, rj: &RelationJson) -> CliResult<Relation> {
    // reuse the presentation decoder so validation stays in one place
    let mut pj = b.to_json();
    pj.relations = vec![rj.clone()];
    let p = Presentation::from_json(&pj)?;
    p.relations.into_iter().next().ok_or_else(|| CliError::usage("relation is trivial"))
}

struct PointsOpts<'a> {
    check: Option<&'a str>,
    count: bool,
    bound: u64,
    pairs: usize,
    seed: u64,
}

fn points<S: Semiring>(g: &GroupModel, s: &S, o: &PointsOpts) -> CliResult<Value> {
    let mut out = json!({"model": g.name, "semiring": s.name()});
    if let Some(text) = o.check {
        let m = parse_matrix(s, &parse_json(text, "matrix")?)?;
        out["matrix"] = matrix_to_json(s, &m);
        out["is_point"] = json!(is_point(g, &m, s)?);
    } else if o.count {
        out["count"] = json!(hom_count(g, s, o.bound)?);
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(o.seed);
        let sample = sample_point(g, s, &mut rng, 500)?;
        out["sample"] = sample.map_or(Value::Null, |m| matrix_to_json(s, &m));
        let r = closure_check(g, s, o.pairs, &mut rng)?;
        out["pairs"] = json!(r.pairs);
        out["failures"] = json!(r.failures);
        out["seed"] = json!(o.seed);
    }
    Ok(out)
}

fn emit(v: &Value, pretty: bool) {
    let s = if pretty { serde_json::to_string_pretty(v) } else { serde_json::to_string(v) }.expect("serializable");
    write_out(&format!("{s}\n"));
}

/// Writes to stdout; a closed pipe ends output silently.
fn write_out(s: &str) {
    use std::io::Write;
    let mut out = std::io::stdout().lock();
    let _ = out.write_all(s.as_bytes()).and_then(|_| out.flush());
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion | ErrorKind::DisplayHelpOnMissingArgumentOrSubcommand) {
                let _ = e.print();
                return ExitCode::from(if e.kind() == ErrorKind::DisplayHelpOnMissingArgumentOrSubcommand { 2 } else { 0 });
            }
            let msg = e.render().to_string();
            let first = msg.lines().next().unwrap_or("").trim_start_matches("error: ").to_string();
            emit(&json!({"error": {"kind": "usage", "message": first}}), false);
            return ExitCode::from(2);
        }
    };
    match run(&cli) {
        Ok(Output::Json(v, ok)) => {
            emit(&v, cli.json_pretty);
            if ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Ok(Output::Text(t)) => {
            write_out(&t);
            ExitCode::SUCCESS
        }
        Err(e) => {
            emit(&json!({"error": {"kind": e.kind, "message": e.message}}), cli.json_pretty);
            ExitCode::from(e.status)
        }
    }
}
