//! `graphcsm`: graph polynomials, deletion-contraction conditions, Feynman
//! rule polynomials and point counts from the command line.
//!
//! Every command prints one JSON report (or a text rendering of it with
//! `--format text`). Exit codes: 0 success, 1 a requested check failed,
//! 2 invalid input, 3 resource guard exceeded, 4 computation blocked on a
//! missing fixture.

use std::io::{Read, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use graphcsm::catalog;
use graphcsm::conditions::{applicability_with, check_conditions_with};
use graphcsm::feynman::{c_to_csm, chi_hypersurface, compute_c_with, Provenance, Registry};
use graphcsm::graphpoly::{psi_enumerate, psi_matrix_tree, psi_recursion, PsiError, PsiResult};
use graphcsm::guards::Limits;
use graphcsm::multigraph::{EdgeClass, EdgeId, GraphFormat, Multigraph};
use graphcsm::pointcount::{
    count_affine_with, verify_doubling_star_with, verify_triple_recursion_with, CountError, DEFAULT_PRIMES,
};
use graphcsm::Rational;
use serde::Serialize;
use serde_json::{json, Value};

#[derive(Parser)]
#[command(name = "graphcsm", version, about = "Graph hypersurface toolkit")]
struct Cli {
    /// Output rendering; JSON is the canonical form.
    #[arg(long, value_enum, global = true, default_value_t = Output::Json)]
    format: Output,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Output {
    Json,
    Text,
}

#[derive(Args)]
struct GraphArg {
    /// Graph file (JSON or edge-list text, `-` for stdin), or a built-in
    /// graph: @banana:N, @polygon:N, @complete:N, @wheel:N,
    /// @triangle-two-doubled, @triangle-all-doubled, @k4-one-doubled.
    graph: String,
    #[arg(long, value_enum, default_value_t = InputFormat::Auto)]
    input_format: InputFormat,
}

#[derive(Clone, Copy, ValueEnum)]
enum InputFormat {
    Auto,
    Json,
    Text,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Method {
    Enum,
    Matrixtree,
    Recursion,
    All,
}

#[derive(Subcommand)]
enum Command {
    /// Graph polynomial Ψ.
    Psi {
        #[command(flatten)]
        input: GraphArg,
        #[arg(long, value_enum, default_value_t = Method::Recursion)]
        method: Method,
    },
    /// Canonical key and edge classification.
    Classify {
        #[command(flatten)]
        input: GraphArg,
    },
    /// Conditions I and II for one regular edge, or deletion-contraction
    /// applicability for every edge when no edge is given.
    Conditions {
        #[command(flatten)]
        input: GraphArg,
        #[arg(long)]
        edge: Option<String>,
    },
    /// Feynman rule polynomial C(t) with its derivation.
    Feynman {
        #[command(flatten)]
        input: GraphArg,
        /// Replace the edge given by --edge (default: first edge) by m parallel copies.
        #[arg(long)]
        multi_edge: Option<usize>,
        #[arg(long)]
        edge: Option<String>,
        /// Extra fixture file merged over the shipped fixtures.
        #[arg(long)]
        fixtures: Option<PathBuf>,
    },
    /// F_p point counts of the affine graph hypersurface.
    Count {
        #[command(flatten)]
        input: GraphArg,
        #[arg(long, value_delimiter = ',')]
        primes: Option<Vec<u64>>,
        /// Pivot edge for the multilinear shortcut.
        #[arg(long)]
        edge: Option<String>,
    },
    /// Check the doubling and multiple-edge counting identities.
    Verify {
        #[command(flatten)]
        input: GraphArg,
        #[arg(long, value_delimiter = ',')]
        primes: Option<Vec<u64>>,
        /// Edge to check (default: every eligible edge).
        #[arg(long)]
        edge: Option<String>,
        /// Doubling identity; the default when --triple is absent.
        #[arg(long)]
        star: bool,
        /// Multiple-edge recursion starting at multiplicity m.
        #[arg(long)]
        triple: Option<usize>,
    },
    /// Inspect or export the fixture registry.
    Fixtures {
        #[command(subcommand)]
        action: FixturesAction,
    },
}

#[derive(Subcommand)]
enum FixturesAction {
    /// Write the shipped fixtures (plus any merged file) as JSON.
    Export {
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        merge: Option<PathBuf>,
    },
    /// List entries.
    List {
        #[arg(long)]
        fixtures: Option<PathBuf>,
    },
    /// Load a fixture file and check it against the shipped entries.
    Validate { path: PathBuf },
}

#[derive(Serialize)]
struct Report {
    command: Vec<String>,
    graph_key: Option<String>,
    result: Value,
    #[serde(skip_serializing_if = "Option::is_none")]
    trace: Option<Value>,
    version: &'static str,
    elapsed_ms: u128,
}

enum Failure {
    Input(String),
    Guard(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Input(_) => 2,
            Failure::Guard(_) => 3,
        }
    }
}

fn input<E: std::fmt::Display>(e: E) -> Failure {
    Failure::Input(e.to_string())
}

/// What a command produced: payload, optional trace, and the exit status it
/// implies.
struct Outcome {
    graph_key: Option<String>,
    result: Value,
    trace: Option<Value>,
    code: u8,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let argv: Vec<String> = std::env::args().skip(1).collect();
    let start = Instant::now();
    let outcome = Limits::from_env().map_err(input).and_then(|limits| run(&cli.command, &limits));
    let elapsed_ms = start.elapsed().as_millis();
    match outcome {
        Ok(out) => {
            let report = Report {
                command: argv,
                graph_key: out.graph_key,
                result: out.result,
                trace: out.trace,
                version: env!("CARGO_PKG_VERSION"),
                elapsed_ms,
            };
            let value = serde_json::to_value(&report).expect("report is serializable");
            emit(&value, cli.format);
            ExitCode::from(out.code)
        }
        Err(failure) => {
            let (kind, msg) = match &failure {
                Failure::Input(m) => ("input", m),
                Failure::Guard(m) => ("guard", m),
            };
            let value = json!({
                "command": argv,
                "error": { "kind": kind, "message": msg },
                "version": env!("CARGO_PKG_VERSION"),
            });
            emit(&value, cli.format);
            eprintln!("error: {msg}");
            ExitCode::from(failure.code())
        }
    }
}

/// Writes the report; a closed stdout (e.g. piping into `head`) is not an error.
fn emit(value: &Value, format: Output) {
    let text = match format {
        Output::Json => serde_json::to_string_pretty(value).expect("json") + "\n",
        Output::Text => render_text(value, 0),
    };
    let _ = std::io::stdout().write_all(text.as_bytes());
}

fn render_text(v: &Value, indent: usize) -> String {
    let pad = "  ".repeat(indent);
    let mut out = String::new();
    match v {
        Value::Object(map) => {
            for (k, v) in map {
                match v {
                    Value::Object(_) | Value::Array(_) if !is_flat(v) => {
                        out += &format!("{pad}{k}:\n{}", render_text(v, indent + 1));
                    }
                    _ => out += &format!("{pad}{k}: {}\n", scalar_text(v)),
                }
            }
        }
        Value::Array(items) => {
            for item in items {
                if is_flat(item) {
                    out += &format!("{pad}- {}\n", scalar_text(item));
                } else {
                    out += &format!("{pad}-\n{}", render_text(item, indent + 1));
                }
            }
        }
        _ => out += &format!("{pad}{}\n", scalar_text(v)),
    }
    out
}

fn is_flat(v: &Value) -> bool {
    match v {
        Value::Object(_) => false,
        Value::Array(items) => items.iter().all(|i| !i.is_object() && !i.is_array()),
        _ => true,
    }
}

fn scalar_text(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        Value::Array(items) => items.iter().map(scalar_text).collect::<Vec<_>>().join(", "),
        other => other.to_string(),
    }
}

fn load_graph(arg: &GraphArg) -> Result<Multigraph, Failure> {
    if let Some(name) = arg.graph.strip_prefix('@') {
        return named_graph(name);
    }
    let text = if arg.graph == "-" {
        let mut s = String::new();
        std::io::stdin().read_to_string(&mut s).map_err(input)?;
        s
    } else {
        std::fs::read_to_string(&arg.graph).map_err(|e| Failure::Input(format!("{}: {e}", arg.graph)))?
    };
    let format = match arg.input_format {
        InputFormat::Auto => GraphFormat::Auto,
        InputFormat::Json => GraphFormat::Json,
        InputFormat::Text => GraphFormat::Text,
    };
    Multigraph::parse(&text, format).map_err(|e| Failure::Input(format!("{}: {e}", arg.graph)))
}

fn named_graph(name: &str) -> Result<Multigraph, Failure> {
    let sized = |min: usize, build: fn(usize) -> Multigraph| -> Result<Multigraph, Failure> {
        let n: usize = name
            .split_once(':')
            .and_then(|(_, n)| n.parse().ok())
            .ok_or_else(|| Failure::Input(format!("built-in graph `{name}` needs a size, e.g. @{name}:3")))?;
        if n < min {
            return Err(Failure::Input(format!("built-in graph `{name}` needs size at least {min}")));
        }
        Ok(build(n))
    };
    match name.split(':').next().unwrap_or("") {
        "banana" => sized(1, Multigraph::banana),
        "polygon" => sized(1, Multigraph::polygon),
        "complete" => sized(1, Multigraph::complete),
        "wheel" => sized(3, catalog::wheel),
        "triangle-two-doubled" => Ok(catalog::triangle_two_doubled()),
        "triangle-all-doubled" => Ok(catalog::triangle_all_doubled()),
        "k4-one-doubled" => Ok(catalog::k4_one_doubled()),
        _ => Err(Failure::Input(format!("unknown built-in graph `@{name}`"))),
    }
}

fn key_of(g: &Multigraph) -> Option<String> {
    g.canonical_key().ok().map(|k| k.to_string())
}

fn edge_arg(g: &Multigraph, label: &str) -> Result<EdgeId, Failure> {
    g.edge_by_label(label).cloned().map_err(input)
}

fn psi_error(e: PsiError) -> Failure {
    match e {
        PsiError::TooManyEdges { .. } => Failure::Guard(e.to_string()),
        other => input(other),
    }
}

fn psi_json(r: &PsiResult<Rational>) -> Value {
    json!({
        "method": r.method,
        "polynomial": r.polynomial.to_string(),
        "terms": r.forest_count,
    })
}

fn run(command: &Command, limits: &Limits) -> Result<Outcome, Failure> {
    match command {
        Command::Psi { input: arg, method } => {
            let g = load_graph(arg)?;
            let mut results = Vec::new();
            if matches!(method, Method::Enum | Method::All) {
                results.push(psi_enumerate::<Rational>(&g).map_err(psi_error)?);
            }
            if matches!(method, Method::Matrixtree | Method::All) {
                results.push(psi_matrix_tree::<Rational>(&g).map_err(psi_error)?);
            }
            if matches!(method, Method::Recursion | Method::All) {
                results.push(psi_recursion::<Rational>(&g));
            }
            let agreement = results.windows(2).all(|w| w[0].polynomial == w[1].polynomial);
            let mut result = json!({
                "polynomial": results[0].polynomial.to_string(),
                "variables": g.variable_names(),
                "degree": results[0].polynomial.total_degree(),
            });
            let mut code = 0;
            if *method == Method::All {
                result["agreement"] = json!(agreement);
                if !agreement {
                    code = 1;
                }
            }
            Ok(Outcome {
                graph_key: key_of(&g),
                result,
                trace: Some(Value::Array(results.iter().map(psi_json).collect())),
                code,
            })
        }
        Command::Classify { input: arg } => {
            let g = load_graph(arg)?;
            let mut edges = Vec::new();
            for e in g.edges() {
                let class = g.classify_edge(&e.id).map_err(input)?;
                let parallel = if class == EdgeClass::Loop {
                    vec![]
                } else {
                    g.parallel_class(&e.id).map_err(input)?
                };
                edges.push(json!({
                    "edge": e.id,
                    "ends": [g.vertices()[e.ends.0].clone(), g.vertices()[e.ends.1].clone()],
                    "variable": e.id.default_variable(),
                    "class": class,
                    "parallel": parallel,
                    "orbit": g.canonical_edge_key(&e.id).ok(),
                }));
            }
            let (_, components) = g.components();
            Ok(Outcome {
                graph_key: key_of(&g),
                result: json!({
                    "vertices": g.vertex_count(),
                    "edges": edges,
                    "components": components,
                    "forest": g.is_forest(),
                    "disjoinable": g.disjoinable(),
                }),
                trace: None,
                code: 0,
            })
        }
        Command::Conditions { input: arg, edge } => {
            let g = load_graph(arg)?;
            let result = match edge {
                Some(label) => {
                    let e = edge_arg(&g, label)?;
                    match check_conditions_with(&g, &e, limits) {
                        Ok(v) => serde_json::to_value(v).expect("json"),
                        Err(err) => return Err(input(err)),
                    }
                }
                None => {
                    let mut all = Vec::new();
                    for e in g.edge_ids() {
                        all.push(serde_json::to_value(applicability_with(&g, e, limits).map_err(input)?).expect("json"));
                    }
                    Value::Array(all)
                }
            };
            Ok(Outcome {
                graph_key: key_of(&g),
                result,
                trace: None,
                code: 0,
            })
        }
        Command::Feynman {
            input: arg,
            multi_edge,
            edge,
            fixtures,
        } => {
            let mut g = load_graph(arg)?;
            if let Some(m) = multi_edge {
                let e = match edge {
                    Some(label) => edge_arg(&g, label)?,
                    None => g
                        .edge_ids()
                        .next()
                        .cloned()
                        .ok_or_else(|| Failure::Input("--multi-edge needs a graph with at least one edge".into()))?,
                };
                g = g.multiply_edge(&e, *m).map_err(input)?;
            }
            let registry = registry_with(fixtures.as_deref())?;
            let (c, derivation) = compute_c_with(&g, &registry);
            let n = g.edge_count();
            let result = match &c {
                Some(c) => {
                    let csm = c_to_csm(c, n, Provenance::Derived).ok();
                    json!({
                        "status": "computed",
                        "c": c.to_string(),
                        "coefficients": c.coeffs().iter().map(|x| x.to_string()).collect::<Vec<_>>(),
                        "euler_characteristic_complement": c.derivative_at_zero().to_string(),
                        "euler_characteristic_hypersurface": chi_hypersurface(c, n).to_string(),
                        "csm_hypersurface": csm.map(|r| r.coeffs.iter().map(|x| x.to_string()).collect::<Vec<_>>()),
                        "edges": n,
                    })
                }
                None => {
                    let missing = match derivation.first_blocker().map(|d| &d.rule) {
                        Some(graphcsm::feynman::Rule::Blocked { missing }) => missing.clone(),
                        _ => "unknown".to_string(),
                    };
                    json!({ "status": "blocked", "missing": missing, "edges": n })
                }
            };
            Ok(Outcome {
                graph_key: key_of(&g),
                result,
                trace: Some(serde_json::to_value(&derivation).expect("json")),
                code: if c.is_some() { 0 } else { 4 },
            })
        }
        Command::Count {
            input: arg,
            primes,
            edge,
        } => {
            let g = load_graph(arg)?;
            let pivot = edge.as_deref().map(|l| edge_arg(&g, l)).transpose()?;
            let key = key_of(&g);
            let mut counts = Vec::new();
            for &p in primes.as_deref().unwrap_or(&DEFAULT_PRIMES) {
                let start = Instant::now();
                let r = count_affine_with(&g, p, pivot.as_ref(), limits).map_err(count_error)?;
                counts.push(json!({
                    "graph_key": key,
                    "p": r.p,
                    "zeros": r.zeros,
                    "complement": r.complement,
                    "elapsed_ms": start.elapsed().as_millis(),
                    "method": r.method,
                }));
            }
            Ok(Outcome {
                graph_key: key,
                result: Value::Array(counts),
                trace: None,
                code: 0,
            })
        }
        Command::Verify {
            input: arg,
            primes,
            edge,
            star,
            triple,
        } => {
            let g = load_graph(arg)?;
            let primes = primes.as_deref().unwrap_or(&DEFAULT_PRIMES);
            let edges: Vec<EdgeId> = match edge {
                Some(label) => vec![edge_arg(&g, label)?],
                None => g
                    .edge_ids()
                    .filter(|e| {
                        let class = g.classify_edge(e).expect("edge of g");
                        match triple {
                            Some(_) if !star => class == EdgeClass::Regular,
                            _ => !matches!(class, EdgeClass::Bridge | EdgeClass::Loop),
                        }
                    })
                    .cloned()
                    .collect(),
            };
            let do_star = *star || triple.is_none();
            let mut checks = Vec::new();
            let mut all_hold = true;
            for e in &edges {
                for &p in primes {
                    if do_star {
                        let r = verify_doubling_star_with(&g, e, p, limits).map_err(count_error)?;
                        all_hold &= r.holds;
                        let mut v = serde_json::to_value(&r).expect("json");
                        v["identity"] = json!("star");
                        checks.push(v);
                    }
                    if let Some(m) = triple {
                        let r = verify_triple_recursion_with(&g, e, p, *m, limits).map_err(count_error)?;
                        all_hold &= r.holds;
                        let mut v = serde_json::to_value(&r).expect("json");
                        v["identity"] = json!("triple");
                        checks.push(v);
                    }
                }
            }
            Ok(Outcome {
                graph_key: key_of(&g),
                result: json!({ "all_hold": all_hold, "checks": checks.len(), "edges": edges }),
                trace: Some(Value::Array(checks)),
                code: if all_hold { 0 } else { 1 },
            })
        }
        Command::Fixtures { action } => fixtures(action),
    }
}

fn count_error(e: CountError) -> Failure {
    match e {
        CountError::GuardExceeded { .. } => Failure::Guard(e.to_string()),
        other => input(other),
    }
}

fn registry_with(extra: Option<&Path>) -> Result<Registry, Failure> {
    let registry = Registry::shipped();
    if let Some(path) = extra {
        let other = Registry::load(path).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?;
        registry.extend_from(&other).map_err(input)?;
    }
    Ok(registry)
}

fn fixtures(action: &FixturesAction) -> Result<Outcome, Failure> {
    let outcome = |result: Value| Outcome {
        graph_key: None,
        result,
        trace: None,
        code: 0,
    };
    match action {
        FixturesAction::Export { out, merge } => {
            let registry = registry_with(merge.as_deref())?;
            match out {
                Some(path) => {
                    registry.save(path).map_err(input)?;
                    Ok(outcome(json!({ "written": path.display().to_string(), "entries": registry.len() })))
                }
                None => Ok(outcome(serde_json::from_str(&registry.to_json()).expect("registry json"))),
            }
        }
        FixturesAction::List { fixtures } => {
            let registry = registry_with(fixtures.as_deref())?;
            let entries: Vec<Value> = registry
                .entries()
                .into_iter()
                .map(|e| {
                    json!({
                        "key": e.key,
                        "name": e.name,
                        "c": e.c.map(|c| c.to_string()),
                        "intersections": e.intersections.keys().collect::<Vec<_>>(),
                        "provenance": e.provenance,
                        "citation": e.citation,
                    })
                })
                .collect();
            Ok(outcome(Value::Array(entries)))
        }
        FixturesAction::Validate { path } => {
            let loaded = Registry::load(path).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?;
            let merged = Registry::shipped();
            merged.extend_from(&loaded).map_err(input)?;
            Ok(outcome(json!({ "valid": true, "entries": loaded.len(), "merged_entries": merged.len() })))
        }
    }
}
