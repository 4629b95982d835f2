//! `blocklat`: batch analysis of permutation groups, block structures and
//! generalised wreath products. Reports are JSON on stdout.
//!
//! Exit status: 0 success, 1 violated property or assertion, 2 unreadable
//! input, 3 resource cap exceeded.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use blocklat::blockstruct::{association_scheme, ObsFile, DEFAULT_DEGREE_CAP};
use blocklat::groupprops::{analyze, invariant_partitions};
use blocklat::gwp::{
    gwp_properties, linear_extension_intersection, semidirect_decomposition, verify_embedding, GwpSpec, GwpSpecFile,
};
use blocklat::lattice::{size_label, PartitionLattice, DEFAULT_LATTICE_CAP};
use blocklat::perm::{GroupFile, PermGroup, DEFAULT_ELEMENT_CAP};
use blocklat::poset::DEFAULT_EXTENSION_CAP;
use blocklat::survey::{survey, CatalogManifest};
use blocklat::Error;

#[derive(Parser)]
#[command(name = "blocklat", version, about = "Invariant partitions, block structures and generalised wreath products")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Global {
    /// Largest number of group elements enumerated explicitly.
    #[arg(long, global = true, env = "BLOCKLAT_CAP_ELEMENTS", default_value_t = DEFAULT_ELEMENT_CAP)]
    cap_elements: usize,
    /// Largest number of points of a product domain.
    #[arg(long, global = true, default_value_t = DEFAULT_DEGREE_CAP)]
    cap_degree: usize,
    /// Worker threads for `survey` (all cores when omitted).
    #[arg(long, global = true)]
    jobs: Option<usize>,
    /// Expected value of a report field, e.g. `ob=true`; exit 1 on mismatch.
    #[arg(long = "assert", global = true, value_name = "KEY=VALUE")]
    asserts: Vec<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Property report for a transitive group.
    Analyze { group: PathBuf },
    /// Lattice of invariant partitions of a group, or the closure of a block-structure file.
    Lattice {
        input: PathBuf,
        /// Emit a Graphviz Hasse diagram instead of JSON.
        #[arg(long)]
        dot: bool,
    },
    /// Association scheme of an orthogonal block structure.
    Scheme {
        obs: PathBuf,
        /// Emit the class matrix as text.
        #[arg(long)]
        matrix: bool,
    },
    /// Generalised wreath product checks.
    Gwp {
        #[command(subcommand)]
        action: GwpAction,
    },
    /// Embed a group with the PB property in the product over its join-indecomposables.
    Embed { group: PathBuf },
    /// Count transitive, OB and pre-primitive groups in a catalog.
    Survey {
        manifest: PathBuf,
        /// Also write one CSV row per group.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum GwpAction {
    /// Order and generators.
    Build { spec: PathBuf },
    /// Kernel and quotient at every minimal node.
    CheckSdp { spec: PathBuf },
    /// Intersection of the iterated wreath products over the linear extensions.
    CheckLinext { spec: PathBuf },
    /// Obstruction to the PB property for primitive components.
    CheckPb { spec: PathBuf },
}

/// A finished command: the JSON report, optional text to print instead,
/// and the property violation if one was found.
struct Output {
    json: Value,
    text: Option<String>,
    violation: Option<String>,
}

impl Output {
    fn report(json: Value) -> Output {
        Output { json, text: None, violation: None }
    }
}

enum Failure {
    Lib(Error),
    Violation(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

type Run = std::result::Result<Output, Failure>;

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T, Error> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))
}

fn load_group(path: &Path, g: &Global) -> Result<PermGroup, Error> {
    let file: GroupFile = read_json(path)?;
    Ok(file.realise()?.with_element_cap(g.cap_elements))
}

fn load_spec(path: &Path, g: &Global) -> Result<GwpSpec, Error> {
    let file: GwpSpecFile = read_json(path)?;
    let spec = file.to_spec(path.parent())?;
    let comps = spec.components().iter().map(|c| c.clone().with_element_cap(g.cap_elements)).collect();
    GwpSpec::with_cap(spec.poset().clone(), comps, g.cap_degree)
}

fn lattice_json(lattice: &PartitionLattice) -> Value {
    json!({
        "size": lattice.len(),
        "partitions": lattice.elements().iter().map(|p| p.to_literal()).collect::<Vec<_>>(),
        "shapes": lattice.elements().iter().map(size_label).collect::<Vec<_>>(),
        "hasse": lattice.hasse(),
        "modular": lattice.is_modular(),
        "distributive": lattice.is_distributive(),
    })
}

fn cmd_analyze(path: &Path, g: &Global) -> Run {
    let group = load_group(path, g)?;
    let report = analyze(&group)?;
    let mut out = serde_json::to_value(&report).expect("report serialises");
    if report.transitive {
        out["lattice"] = lattice_json(invariant_partitions(&group)?.lattice());
    }
    Ok(Output::report(out))
}

fn cmd_lattice(path: &Path, dot: bool, g: &Global) -> Run {
    let raw: Value = read_json(path)?;
    let lattice = if raw.get("generators").is_some() {
        invariant_partitions(&load_group(path, g)?)?.lattice().clone()
    } else {
        let file: ObsFile =
            serde_json::from_value(raw).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
        PartitionLattice::close(file.degree, &file.to_partitions()?, DEFAULT_LATTICE_CAP)?
    };
    let json = lattice_json(&lattice);
    Ok(Output { json, text: dot.then(|| lattice.to_dot()), violation: None })
}

fn cmd_scheme(path: &Path, matrix: bool) -> Run {
    let file: ObsFile = read_json(path)?;
    let obs = file.validate()?;
    let scheme = association_scheme(&obs);
    if !scheme.verify() {
        return Err(Failure::Violation("scheme fails the association-scheme axioms".into()));
    }
    let json = json!({
        "degree": scheme.degree(),
        "classes": scheme.num_classes(),
        "class_sizes": scheme.class_sizes(),
        "verified": true,
    });
    Ok(Output { json, text: matrix.then(|| scheme.to_text()), violation: None })
}

fn cmd_gwp(action: &GwpAction, g: &Global) -> Run {
    match action {
        GwpAction::Build { spec } => {
            let spec = load_spec(spec, g)?;
            let group = spec.group();
            let order = group.order();
            let expected = spec.expected_order()?;
            let json = json!({
                "name": spec.name(),
                "degree": spec.degree(),
                "order": order,
                "expected_order": expected,
                "generators": group.generators().iter().map(|p| p.images()).collect::<Vec<_>>(),
            });
            let violation =
                (order != expected).then(|| format!("order {order} differs from the product formula {expected}"));
            Ok(Output { json, text: None, violation })
        }
        GwpAction::CheckSdp { spec } => {
            let spec = load_spec(spec, g)?;
            let mut nodes = Vec::new();
            let mut failed = Vec::new();
            for p in (0..spec.size()).filter(|&p| spec.poset().descendants_strict(p).is_empty()) {
                let d = semidirect_decomposition(&spec, p)?;
                let label = spec.poset().label(p).to_string();
                if !d.holds() {
                    failed.push(label.clone());
                }
                nodes.push(json!({
                    "node": label,
                    "kernel_order": d.kernel.order(),
                    "quotient_order": d.quotient.order(),
                    "quotient_matches": d.quotient_matches,
                    "kernel_order_matches": d.kernel_order_matches,
                    "classes": d.classes.blocks(),
                    "acting_classes": d.acting_classes.blocks(),
                    "literal_classes": d.literal_classes.blocks(),
                    "literal_reading_agrees": d.literal_classes == d.acting_classes,
                    "holds": d.holds(),
                }));
            }
            let violation = (!failed.is_empty()).then(|| format!("decomposition fails at {}", failed.join(", ")));
            Ok(Output { json: json!({ "nodes": nodes, "holds": failed.is_empty() }), text: None, violation })
        }
        GwpAction::CheckLinext { spec } => {
            let spec = load_spec(spec, g)?;
            let r = linear_extension_intersection(&spec, DEFAULT_EXTENSION_CAP)?;
            let ok = r.equal && r.generators_contained;
            let mut json = serde_json::to_value(&r).expect("report serialises");
            json["holds"] = json!(ok);
            let violation = (!ok).then(|| "intersection over linear extensions differs from the product".to_string());
            Ok(Output { json, text: None, violation })
        }
        GwpAction::CheckPb { spec } => {
            let spec = load_spec(spec, g)?;
            let p = gwp_properties(&spec)?;
            let json = json!({
                "obstruction": p.obstruction,
                "pb": p.report.pb,
                "ob": p.report.ob,
                "preprimitive": p.report.preprimitive,
                "invariant_partitions": p.invariant_partitions,
                "downsets": p.downsets,
                "consistent": p.consistent,
            });
            let violation = (!p.consistent).then(|| "obstruction, PB and down-set count disagree".to_string());
            Ok(Output { json, text: None, violation })
        }
    }
}

fn cmd_embed(path: &Path, g: &Global) -> Run {
    let group = load_group(path, g)?;
    let inv = invariant_partitions(&group)?;
    if let Some((a, b)) = inv.is_ob().witness {
        return Err(Failure::Violation(format!("not OB: {a} and {b} do not commute")));
    }
    if !inv.lattice().is_distributive() {
        return Err(Failure::Violation("not PB: the invariant lattice is not distributive".into()));
    }
    let r = verify_embedding(&group, Some(inv.lattice()))?;
    let mut json = serde_json::to_value(&r).expect("report serialises");
    json["component_orders"] = json!(r.nodes.iter().map(|n| n.gstar_order).collect::<Vec<_>>());
    let violation = (!r.verdict).then(|| r.message.clone());
    Ok(Output { json, text: None, violation })
}

fn cmd_survey(path: &Path, csv_path: Option<&Path>, g: &Global) -> Run {
    let (manifest, base) = CatalogManifest::load(path)?;
    let s = survey(&manifest, &base, g.jobs)?;
    if let Some(out) = csv_path {
        let io = |e: String| Error::Parse(format!("{}: {e}", out.display()));
        let mut w = csv::Writer::from_path(out).map_err(|e| io(e.to_string()))?;
        for e in &s.entries {
            w.serialize(e).map_err(|e| io(e.to_string()))?;
        }
        w.flush().map_err(|e| io(e.to_string()))?;
    }
    let violation = (!s.mismatches.is_empty()).then(|| s.mismatches.join("; "));
    Ok(Output { json: json!({ "rows": s.rows, "mismatches": s.mismatches }), text: None, violation })
}

/// Looks up a dotted path such as `report.pb` in a JSON object.
fn lookup<'a>(value: &'a Value, key: &str) -> Option<&'a Value> {
    key.split('.').try_fold(value, |v, k| v.get(k))
}

/// Checks `KEY=VALUE` assertions; `Err` carries a malformed assertion.
fn check_asserts(json: &Value, asserts: &[String]) -> Result<Vec<String>, String> {
    let mut failures = Vec::new();
    for a in asserts {
        let (key, want) = a.split_once('=').ok_or_else(|| format!("assertion {a:?} is not KEY=VALUE"))?;
        let want: Value = serde_json::from_str(want).unwrap_or_else(|_| Value::String(want.to_string()));
        match lookup(json, key) {
            None => return Err(format!("assertion key {key:?} is not in the report")),
            Some(got) if *got != want => failures.push(format!("{key} is {got}, expected {want}")),
            Some(_) => {}
        }
    }
    Ok(failures)
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::CapExceeded { .. } => 3,
        Error::Parse(_)
        | Error::InvalidPermutation(_)
        | Error::InvalidPartition(_)
        | Error::DegreeMismatch { .. }
        | Error::PointOutOfRange { .. }
        | Error::UnknownElement(_)
        | Error::PosetCycle(_)
        | Error::GroundSetMismatch => 2,
        _ => 1,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let g = &cli.global;
    let result = match &cli.command {
        Command::Analyze { group } => cmd_analyze(group, g),
        Command::Lattice { input, dot } => cmd_lattice(input, *dot, g),
        Command::Scheme { obs, matrix } => cmd_scheme(obs, *matrix),
        Command::Gwp { action } => cmd_gwp(action, g),
        Command::Embed { group } => cmd_embed(group, g),
        Command::Survey { manifest, csv } => cmd_survey(manifest, csv.as_deref(), g),
    };
    let out = match result {
        Ok(out) => out,
        Err(Failure::Violation(msg)) => {
            eprintln!("blocklat: {msg}");
            return ExitCode::from(1);
        }
        Err(Failure::Lib(e)) => {
            eprintln!("blocklat: {e}");
            return ExitCode::from(exit_code(&e));
        }
    };
    let body = match &out.text {
        Some(text) => text.clone(),
        None => serde_json::to_string_pretty(&out.json).expect("JSON value serialises") + "\n",
    };
    // A closed pipe (e.g. `| head`) is not an error for a report writer.
    let _ = std::io::stdout().lock().write_all(body.as_bytes());
    let mut status = 0;
    if let Some(v) = &out.violation {
        eprintln!("blocklat: {v}");
        status = 1;
    }
    match check_asserts(&out.json, &g.asserts) {
        Ok(failures) => {
            for f in &failures {
                eprintln!("blocklat: assertion failed: {f}");
            }
            if !failures.is_empty() {
                status = 1;
            }
        }
        Err(msg) => {
            eprintln!("blocklat: {msg}");
            return ExitCode::from(2);
        }
    }
    ExitCode::from(status)
}
