use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};
use thiserror::Error;

use hda_topology::accessibility::make_accessible;
use hda_topology::coskeleton::{model_of_skeleton, verify_hda_model, LabelRelation, RelationJson};
use hda_topology::fixtures;
use hda_topology::geom::{delta_compat_check, roundtrip_check, ArithmeticMode};
use hda_topology::hda::{classify, hda_p, to_transition_system, Hda, HdaJson};
use hda_topology::homology::{cubical_chain_complex, homology, HomologyGroups};
use hda_topology::precubical::{validate, Cell, PcsJson, PrecubicalSet};
use hda_topology::simplicial::{
    cube_pair, cubical_subdivision, simplicial_chain_complex, ComplexJson, SimplicialComplex,
};
use hda_topology::svs::{realize, svs_from_hda, transition_system_model, SharedVariableSystem};

/// Float round trips must agree to this tolerance.
const FLOAT_TOLERANCE: f64 = 1e-9;

#[derive(Parser, Debug)]
#[command(
    name = "hdatopo",
    version,
    about = "Precubical sets, HDA models and shared-variable systems"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Arithmetic used by geometric checks.
    #[arg(long, value_enum, global = true, default_value_t = Mode::Float)]
    mode: Mode,
    /// Number of random samples for geometric checks.
    #[arg(long, global = true, default_value_t = 1000)]
    samples: usize,
    /// Seed for every random choice.
    #[arg(long, global = true, default_value_t = 1)]
    seed: u64,
    /// Highest cube dimension the filling may create.
    #[arg(long, global = true)]
    max_dim: Option<usize>,
    /// Write the result here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Mode {
    Rational,
    Float,
}

impl From<Mode> for ArithmeticMode {
    fn from(m: Mode) -> Self {
        match m {
            Mode::Rational => ArithmeticMode::Rational,
            Mode::Float => ArithmeticMode::Float,
        }
    }
}

/// Inputs are JSON files, `-` for stdin, or `fixture:NAME` for a bundled example.
#[derive(Subcommand, Debug)]
enum Command {
    /// Check a complex, precubical set, HDA or shared-variable system.
    Validate { input: String },
    /// Cubical subdivision of a simplicial complex.
    Subdivide { input: String },
    /// Sample the maps between a complex and its subdivision.
    GeomCheck {
        input: String,
        /// Samples per face for the face-compatibility check.
        #[arg(long, default_value_t = 10)]
        face_samples: usize,
    },
    /// HDA on the cubical subdivision of a complex.
    Hda { input: String },
    /// HDA model of the 1-skeleton of an HDA.
    Fill {
        input: String,
        /// Label relation as `{"pairs": [[a, b], ...]}` or `{"order": [...]}`;
        /// defaults to the alphabet order.
        #[arg(long)]
        relation: Option<String>,
    },
    /// Check the model conditions of an HDA against its 1-skeleton.
    VerifyModel {
        input: String,
        #[arg(long)]
        relation: Option<String>,
    },
    /// Make an HDA (or the HDA of a complex) accessible.
    Accessible { input: String },
    /// Shared-variable system generated from an accessible deterministic HDA.
    ToSvs { input: String },
    /// Transition-system model of a shared-variable system.
    Statespace { input: String },
    /// Complex → accessible HDA → shared-variable system → its HDA model.
    Realize { input: String },
    /// Integral homology of a complex, precubical set or HDA.
    Homology { input: String },
    /// Graphviz rendering of the 2-skeleton.
    ExportDot { input: String },
}

#[derive(Debug, Error)]
enum CliError {
    #[error("{path}: {message}")]
    Io { path: String, message: String },
    #[error("{0}")]
    Json(String),
    #[error("{message}")]
    Module {
        kind: &'static str,
        message: String,
        details: Option<Value>,
    },
}

impl CliError {
    fn module(kind: &'static str, e: impl std::fmt::Display) -> Self {
        CliError::Module {
            kind,
            message: e.to_string(),
            details: None,
        }
    }

    fn to_json(&self) -> Value {
        match self {
            CliError::Io { .. } => json!({"error": "io", "message": self.to_string()}),
            CliError::Json(_) => json!({"error": "json", "message": self.to_string()}),
            CliError::Module {
                kind,
                message,
                details,
            } => {
                let mut v = json!({"error": kind, "message": message});
                if let Some(d) = details {
                    v["details"] = d.clone();
                }
                v
            }
        }
    }
}

fn parse<T: serde::de::DeserializeOwned>(v: &Value) -> Result<T, CliError> {
    serde_json::from_value(v.clone()).map_err(|e| CliError::Json(e.to_string()))
}

fn read_input(input: &str) -> Result<Value, CliError> {
    let text = if let Some(name) = input.strip_prefix("fixture:") {
        if name == "peterson" {
            fixtures::PETERSON_JSON.to_string()
        } else {
            fixtures::complex_json(name)
                .ok_or_else(|| CliError::Io {
                    path: input.into(),
                    message: "no such fixture".into(),
                })?
                .to_string()
        }
    } else if input == "-" {
        std::io::read_to_string(std::io::stdin()).map_err(|e| CliError::Io {
            path: input.into(),
            message: e.to_string(),
        })?
    } else {
        std::fs::read_to_string(Path::new(input)).map_err(|e| CliError::Io {
            path: input.into(),
            message: e.to_string(),
        })?
    };
    serde_json::from_str(&text).map_err(|e| CliError::Json(format!("{input}: {e}")))
}

enum Input {
    Complex(SimplicialComplex),
    Pcs(PcsJson),
    Hda(HdaJson),
    Svs(SharedVariableSystem),
}

/// Recognizes an input by its fields. Wrapped outputs of other commands
/// (`{"hda": …}`, `{"system": …}`) are unwrapped.
fn classify_input(v: &Value) -> Result<Input, CliError> {
    let has = |k: &str| v.get(k).is_some();
    if has("n_vertices") {
        let json: ComplexJson = parse(v)?;
        return SimplicialComplex::from_json(&json)
            .map(Input::Complex)
            .map_err(|e| CliError::module("complex", e));
    }
    if has("graphs") {
        return parse(v).map(Input::Svs);
    }
    if has("initial") && has("labels") {
        return parse(v).map(Input::Hda);
    }
    if has("cubes") {
        return parse(v).map(Input::Pcs);
    }
    if let Some(inner) = v.get("hda").or_else(|| v.get("model")) {
        return classify_input(inner);
    }
    if let Some(inner) = v.get("system") {
        return classify_input(inner);
    }
    Err(CliError::Json(
        "unrecognized input: expected a complex, precubical set, HDA or system".into(),
    ))
}

fn load_complex(input: &str) -> Result<SimplicialComplex, CliError> {
    match classify_input(&read_input(input)?)? {
        Input::Complex(k) => Ok(k),
        _ => Err(CliError::Json(format!(
            "{input}: expected a simplicial complex"
        ))),
    }
}

fn hda_from_json(json: &HdaJson) -> Result<Hda, CliError> {
    Hda::from_json(json).map_err(|e| CliError::module("hda", e))
}

/// HDA input; a complex is turned into the HDA of its subdivision.
fn load_hda(input: &str) -> Result<Hda, CliError> {
    match classify_input(&read_input(input)?)? {
        Input::Hda(json) => hda_from_json(&json),
        Input::Complex(k) => Ok(hda_p(&k)),
        _ => Err(CliError::Json(format!("{input}: expected an HDA"))),
    }
}

fn load_svs(input: &str) -> Result<SharedVariableSystem, CliError> {
    match classify_input(&read_input(input)?)? {
        Input::Svs(s) => Ok(s),
        _ => Err(CliError::Json(format!(
            "{input}: expected a shared-variable system"
        ))),
    }
}

fn load_relation(path: Option<&str>, a: &Hda) -> Result<LabelRelation, CliError> {
    match path {
        None => Ok(LabelRelation::strict_order(a.alphabet())),
        Some(p) => Ok(LabelRelation::from_json(&parse::<RelationJson>(
            &read_input(p)?,
        )?)),
    }
}

fn pcs_from_json(json: &PcsJson) -> Result<PrecubicalSet, CliError> {
    let set = PrecubicalSet::from_json(json).map_err(|e| CliError::module("precubical", e))?;
    let report = validate(&set);
    if !report.is_valid() {
        return Err(CliError::Module {
            kind: "precubical",
            message: format!("{} face identities fail", report.violations.len()),
            details: Some(serde_json::to_value(&report.violations).expect("serializable")),
        });
    }
    Ok(set)
}

#[derive(Serialize)]
struct HomologyOutput {
    betti: Vec<usize>,
    torsion: Vec<Vec<String>>,
    euler: i64,
    groups: HomologyGroups,
}

impl From<HomologyGroups> for HomologyOutput {
    fn from(h: HomologyGroups) -> Self {
        HomologyOutput {
            betti: h.betti_numbers(),
            torsion: h
                .torsion_table()
                .iter()
                .map(|r| r.iter().map(|f| f.to_string()).collect())
                .collect(),
            euler: h.euler_characteristic(),
            groups: h,
        }
    }
}

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("outputs serialize")
}

fn cmd_validate(input: &str) -> Result<Value, CliError> {
    match classify_input(&read_input(input)?)? {
        Input::Complex(k) => {
            Ok(json!({"kind": "complex", "valid": true, "f_vector": k.f_vector()}))
        }
        Input::Pcs(json) => {
            let set = pcs_from_json(&json)?;
            Ok(json!({"kind": "precubical", "valid": true, "counts": set.counts()}))
        }
        Input::Hda(json) => {
            pcs_from_json(&json.pcs)?;
            let a = hda_from_json(&json)?;
            Ok(
                json!({"kind": "hda", "valid": true, "counts": a.pcs().counts(), "classification": to_value(&classify(&a))}),
            )
        }
        Input::Svs(s) => {
            s.validate().map_err(|e| CliError::module("svs", e))?;
            Ok(
                json!({"kind": "svs", "valid": true, "processes": s.graphs.len(), "variables": s.variables.len()}),
            )
        }
    }
}

fn cmd_geom_check(cli: &Cli, input: &str, face_samples: usize) -> Result<(Value, bool), CliError> {
    let k = load_complex(input)?;
    let mode: ArithmeticMode = cli.mode.into();
    let rt = roundtrip_check(&k, cli.samples, cli.seed, mode)
        .map_err(|e| CliError::module("geom", e))?;
    let p = cubical_subdivision(&k);
    let (mut faces, mut worst, mut all_exact) = (0usize, 0.0f64, true);
    for cell in p.all_cells().filter(|c| c.dim > 0) {
        let cube = cube_pair(&p, cell);
        for i in 1..=cell.dim {
            for kk in 0..2 {
                let r = delta_compat_check(&cube, i, kk, face_samples, cli.seed, mode)
                    .map_err(|e| CliError::module("geom", e))?;
                faces += 1;
                worst = worst.max(r.max_error);
                all_exact &= r.exact;
            }
        }
    }
    let passed = match mode {
        ArithmeticMode::Float => {
            rt.max_error < FLOAT_TOLERANCE && rt.cube_mismatches == 0 && worst < FLOAT_TOLERANCE
        }
        ArithmeticMode::Rational => rt.exact && all_exact,
    };
    let out = json!({
        "roundtrip": to_value(&rt),
        "faces": {"checked": faces, "samples": face_samples, "max_error": worst, "exact": all_exact},
        "passed": passed,
    });
    Ok((out, passed))
}

fn cmd_homology(input: &str) -> Result<Value, CliError> {
    let h = match classify_input(&read_input(input)?)? {
        Input::Complex(k) => homology(&simplicial_chain_complex(&k)),
        Input::Pcs(json) => homology(
            &cubical_chain_complex(&pcs_from_json(&json)?)
                .map_err(|e| CliError::module("homology", e))?,
        ),
        Input::Hda(json) => homology(
            &cubical_chain_complex(hda_from_json(&json)?.pcs())
                .map_err(|e| CliError::module("homology", e))?,
        ),
        Input::Svs(_) => {
            return Err(CliError::Json(
                "homology of a system: run statespace or realize first".into(),
            ))
        }
    };
    Ok(to_value(&HomologyOutput::from(h)))
}

fn dot_id(s: &str) -> String {
    serde_json::to_string(s).expect("string serializes")
}

fn cmd_export_dot(input: &str) -> Result<String, CliError> {
    let (set, labels, initial) = match classify_input(&read_input(input)?)? {
        Input::Complex(k) => {
            let a = hda_p(&k);
            let labels: Vec<String> = a
                .labels()
                .iter()
                .map(|&l| a.alphabet()[l].to_string())
                .collect();
            let initial = a.initial();
            (a.pcs().clone(), Some(labels), Some(initial))
        }
        Input::Pcs(json) => (pcs_from_json(&json)?, None, None),
        Input::Hda(json) => {
            let a = hda_from_json(&json)?;
            let labels: Vec<String> = a
                .labels()
                .iter()
                .map(|&l| a.alphabet()[l].to_string())
                .collect();
            let initial = a.initial();
            (a.pcs().clone(), Some(labels), Some(initial))
        }
        Input::Svs(_) => {
            return Err(CliError::Json(
                "export-dot expects a complex, precubical set or HDA".into(),
            ))
        }
    };
    let mut out =
        String::from("digraph hda {\n  rankdir=LR;\n  node [shape=circle, label=\"\"];\n");
    for v in set.cells(0) {
        let shape = if Some(v.index) == initial {
            ", shape=doublecircle"
        } else {
            ""
        };
        let _ = writeln!(
            out,
            "  v{} [tooltip={}{shape}];",
            v.index,
            dot_id(set.key(v))
        );
    }
    for e in set.cells(1) {
        let label = labels
            .as_ref()
            .map_or_else(|| set.key(e).to_string(), |l| l[e.index].clone());
        let _ = writeln!(
            out,
            "  v{} -> v{} [label={}];",
            set.source(e.index),
            set.target(e.index),
            dot_id(&label)
        );
    }
    for sq in set.cells(2) {
        let mut corners: Vec<usize> = Vec::new();
        for edge in set.faces(sq).iter().flatten() {
            for end in [set.source(*edge), set.target(*edge)] {
                if !corners.contains(&end) {
                    corners.push(end);
                }
            }
        }
        let _ = write!(
            out,
            "  subgraph square{} {{\n    graph [style=filled, fillcolor=lightgray, tooltip={}];\n   ",
            sq.index,
            dot_id(set.key(Cell::new(2, sq.index)))
        );
        for c in corners {
            let _ = write!(out, " v{c};");
        }
        out.push_str("\n  }\n");
    }
    out.push_str("}\n");
    Ok(out)
}

enum Output {
    Json(Value),
    Text(String),
}

/// Runs a command; the flag is false when a check ran but did not pass.
fn run(cli: &Cli) -> Result<(Output, bool), CliError> {
    let ok = |v: Value| Ok((Output::Json(v), true));
    match &cli.command {
        Command::Validate { input } => ok(cmd_validate(input)?),
        Command::Subdivide { input } => ok(to_value(
            &cubical_subdivision(&load_complex(input)?).to_json(),
        )),
        Command::GeomCheck {
            input,
            face_samples,
        } => {
            let (v, passed) = cmd_geom_check(cli, input, *face_samples)?;
            Ok((Output::Json(v), passed))
        }
        Command::Hda { input } => ok(to_value(&hda_p(&load_complex(input)?).to_json())),
        Command::Fill { input, relation } => {
            let a = load_hda(input)?;
            let r = load_relation(relation.as_deref(), &a)?;
            let m = model_of_skeleton(&a, &r, cli.max_dim)
                .map_err(|e| CliError::module("coskeleton", e))?;
            ok(to_value(&m.to_json()))
        }
        Command::VerifyModel { input, relation } => {
            let a = load_hda(input)?;
            let r = load_relation(relation.as_deref(), &a)?;
            let t = to_transition_system(&a).map_err(|e| CliError::module("hda", e))?;
            let report = verify_hda_model(&a, &t, &r);
            let passed = report.passed();
            Ok((Output::Json(to_value(&report)), passed))
        }
        Command::Accessible { input } => {
            let a = load_hda(input)?;
            let (b, cert) =
                make_accessible(&a).map_err(|e| CliError::module("accessibility", e))?;
            ok(json!({"hda": to_value(&b.to_json()), "certificate": to_value(&cert)}))
        }
        Command::ToSvs { input } => {
            let b = load_hda(input)?;
            ok(to_value(
                &svs_from_hda(&b).map_err(|e| CliError::module("svs", e))?,
            ))
        }
        Command::Statespace { input } => {
            let s = load_svs(input)?;
            let t = transition_system_model(&s).map_err(|e| CliError::module("svs", e))?;
            ok(to_value(&t.hda().to_json()))
        }
        Command::Realize { input } => {
            let k = load_complex(input)?;
            let r = realize(&k, cli.max_dim).map_err(|e| CliError::module("svs", e))?;
            let passed = r.certificate.isomorphic && r.certificate.homology_matches;
            let v = json!({
                "certificate": to_value(&r.certificate),
                "system": to_value(&r.system),
                "model": to_value(&r.model.to_json()),
            });
            Ok((Output::Json(v), passed))
        }
        Command::Homology { input } => ok(cmd_homology(input)?),
        Command::ExportDot { input } => Ok((Output::Text(cmd_export_dot(input)?), true)),
    }
}

fn emit(cli: &Cli, out: Output) -> Result<(), CliError> {
    let text = match out {
        Output::Json(v) => serde_json::to_string_pretty(&v).expect("JSON values serialize") + "\n",
        Output::Text(t) => t,
    };
    match &cli.out {
        Some(path) => std::fs::write(path, text).map_err(|e| CliError::Io {
            path: path.display().to_string(),
            message: e.to_string(),
        }),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = run(&cli).and_then(|(out, passed)| emit(&cli, out).map(|()| passed));
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!(
                "{}",
                serde_json::to_string(&e.to_json()).expect("JSON values serialize")
            );
            ExitCode::from(1)
        }
    }
}
