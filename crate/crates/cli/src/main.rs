//! `rigcount` command-line front end.
//!
//! Reports go to stdout (JSON with `--json`, a short summary otherwise); diagnostics go to
//! stderr. Exit codes: 0 success (rigid, verified, reproduced), 1 negative answer (flexible,
//! refuted, not reproduced), 2 error, 3 unreliable engine result.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use rigcount::certificates::{self, Certificate, Verdict};
use rigcount::engine::count_with_real_samples;
use rigcount::io::{read_graph_file, ParsedGraph};
use rigcount::ops::{self, ConstructionStep, ReplacementKind};
use rigcount::rigidity::is_d_rigid;
use rigcount::{Dimension, Edge, EngineConfig, Error, Graph, Result, Vertex};

#[derive(Parser)]
#[command(name = "rigcount", version, about = "Realisation numbers of rigid graphs")]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone, Default)]
struct Common {
    /// Ambient dimension (default 2; sphere certificates always use 3).
    #[arg(long, global = true)]
    d: Option<usize>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Independent generic samples that must agree on the complex count.
    #[arg(long, global = true)]
    samples: Option<usize>,
    /// Largest number of unknowns k for which 2^k paths are tracked.
    #[arg(long, global = true)]
    path_cap: Option<usize>,
    #[arg(long, global = true, env = "RIGIDITY_THREADS")]
    threads: Option<usize>,
    /// Print the report as JSON.
    #[arg(long, global = true)]
    json: bool,
    /// Also write the JSON report to this file.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Engine configuration JSON; the flags above override it.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true)]
    retries: Option<usize>,
    #[arg(long, global = true)]
    corrector_tol: Option<f64>,
    #[arg(long, global = true)]
    dedup_tol: Option<f64>,
    #[arg(long, global = true)]
    real_tol: Option<f64>,
    /// Track one path per sign-flip orbit and reflect the endpoints.
    #[arg(long, global = true)]
    orbit_reduction: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Generic d-rigidity and minimal rigidity.
    Rigid { graph: PathBuf },
    /// Complex realisation number, optionally with sampled real counts.
    Count {
        graph: PathBuf,
        #[arg(long, default_value_t = 0)]
        real_samples: usize,
    },
    /// Produce a certificate.
    Certify {
        #[command(subcommand)]
        what: CertifyCommand,
    },
    /// Recompute a certificate file and compare.
    Verify { certificate: PathBuf },
}

#[derive(Subcommand)]
enum CertifyCommand {
    /// Lower bound 2^(n-4) for a triangulated sphere given with faces.
    Sphere {
        triangulation: PathBuf,
        /// Also run the engine when n is at most this.
        #[arg(long, default_value_t = 6)]
        count_up_to: usize,
    },
    /// c_d(G) divides c_d(H) for a spanning subgraph H.
    Divides {
        #[arg(long)]
        g: PathBuf,
        #[arg(long)]
        h: PathBuf,
    },
    /// c_d(H) divides c_d(G) for a rigid subgraph H given on G's vertex ids.
    Subgraph {
        #[arg(long)]
        g: PathBuf,
        #[arg(long)]
        h: PathBuf,
    },
    /// Adding a non-edge keeps the count or at least halves it.
    EdgeDrop {
        graph: PathBuf,
        /// The non-edge, as `u-v`.
        #[arg(long, value_parser = parse_edge)]
        edge: Edge,
    },
    /// Greedily add count-lowering edges until the graph is globally rigid.
    Augment {
        graph: PathBuf,
        /// Maximum number of engine counts.
        #[arg(long, default_value_t = 64)]
        max_counts: usize,
    },
    /// Predicted effect of one construction step on the count.
    Operation(OperationArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum OpKind {
    ZeroExtension,
    OneExtension,
    VertexSplit,
    SpiderSplit,
    XReplacement,
    VReplacement,
    EdgeContraction,
}

#[derive(Args)]
struct OperationArgs {
    /// The graph before the step.
    graph: PathBuf,
    #[arg(long, value_enum, required_unless_present = "step")]
    kind: Option<OpKind>,
    /// A construction step in JSON, instead of `--kind` and its arguments.
    #[arg(long, conflicts_with = "kind")]
    step: Option<PathBuf>,
    #[arg(long, value_delimiter = ',')]
    neighbors: Vec<Vertex>,
    /// Edge removed by a 1-extension, as `u-v`.
    #[arg(long, value_parser = parse_edge)]
    removed: Option<Edge>,
    #[arg(long, value_delimiter = ',')]
    extra: Vec<Vertex>,
    #[arg(long)]
    x: Option<Vertex>,
    #[arg(long, value_delimiter = ',')]
    n1: Vec<Vertex>,
    #[arg(long, value_delimiter = ',')]
    n2: Vec<Vertex>,
    #[arg(long, value_delimiter = ',')]
    w: Vec<Vertex>,
    #[arg(long, value_parser = parse_edge)]
    e: Option<Edge>,
    #[arg(long, value_parser = parse_edge)]
    f: Option<Edge>,
    /// Edge contracted, as `kept-removed`.
    #[arg(long, value_parser = parse_pair)]
    contract: Option<(Vertex, Vertex)>,
}

fn parse_pair(s: &str) -> std::result::Result<(Vertex, Vertex), String> {
    let parts: Vec<&str> = s.split(|c: char| c == '-' || c == ',' || c.is_whitespace()).filter(|p| !p.is_empty()).collect();
    match parts.as_slice() {
        [a, b] => Ok((a.parse().map_err(|e| format!("{e}"))?, b.parse().map_err(|e| format!("{e}"))?)),
        _ => Err(format!("expected two vertices like `0-1`, got `{s}`")),
    }
}

fn parse_edge(s: &str) -> std::result::Result<Edge, String> {
    let (u, v) = parse_pair(s)?;
    Edge::try_new(u, v).ok_or_else(|| format!("`{s}` is a loop"))
}

enum Outcome {
    Ok,
    Negative,
    Unreliable,
}

impl Outcome {
    fn code(&self) -> ExitCode {
        match self {
            Outcome::Ok => ExitCode::SUCCESS,
            Outcome::Negative => ExitCode::from(1),
            Outcome::Unreliable => ExitCode::from(3),
        }
    }
}

struct Report {
    json: Value,
    summary: String,
    outcome: Outcome,
}

fn engine_config(c: &Common) -> Result<EngineConfig> {
    let mut cfg = match &c.config {
        Some(p) => serde_json::from_str(&std::fs::read_to_string(p)?)?,
        None => EngineConfig::default(),
    };
    if let Some(s) = c.seed {
        cfg.seed = s;
    }
    if let Some(s) = c.samples {
        cfg.lambda_samples = s;
    }
    if let Some(p) = c.path_cap {
        cfg.path_cap = p;
    }
    if c.threads.is_some() {
        cfg.threads = c.threads;
    }
    if let Some(r) = c.retries {
        cfg.retries = r;
    }
    if let Some(t) = c.corrector_tol {
        cfg.tracker.corrector_tol = t;
    }
    if let Some(t) = c.dedup_tol {
        cfg.tracker.dedup_tol = t;
    }
    if let Some(t) = c.real_tol {
        cfg.tracker.real_tol = t;
    }
    if c.orbit_reduction {
        cfg.tracker.orbit_reduction = true;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn dimension(c: &Common) -> Result<Dimension> {
    Dimension::new(c.d.unwrap_or(2))
}

fn load(path: &Path) -> Result<ParsedGraph> {
    read_graph_file(path).map_err(|e| match e {
        Error::Io(io) => Error::Io(std::io::Error::new(io.kind(), format!("{}: {io}", path.display()))),
        other => other,
    })
}

fn to_value<T: Serialize>(v: &T) -> Result<Value> {
    Ok(serde_json::to_value(v)?)
}

fn rigid(path: &Path, common: &Common) -> Result<Report> {
    let d = dimension(common)?;
    let cfg = engine_config(common)?;
    let g = load(path)?.graph;
    let r = is_d_rigid(&g, d, cfg.seed);
    let mut json = to_value(&r)?;
    json["d"] = json!(d.get());
    json["n"] = json!(g.n());
    let summary = format!(
        "{}: {} in dimension {} (rank {} of {}, {} edges)",
        path.display(),
        if r.minimal { "minimally rigid" } else if r.rigid { "rigid" } else { "flexible" },
        d,
        r.rank,
        r.threshold,
        r.edges
    );
    Ok(Report { json, summary, outcome: if r.rigid { Outcome::Ok } else { Outcome::Negative } })
}

fn count(path: &Path, real_samples: usize, common: &Common) -> Result<Report> {
    let d = dimension(common)?;
    let cfg = engine_config(common)?;
    let g = load(path)?.graph;
    let r = count_with_real_samples(&g, d, real_samples, &cfg)?;
    let mut summary = format!("c_{} = {}", d, r.c);
    if real_samples > 0 {
        summary.push_str(&format!(", r_lower = {} over {real_samples} real samples", r.r_lower));
    }
    summary.push_str(&format!(
        " ({} paths, {} converged, {}{})",
        r.paths.tracked,
        r.paths.converged,
        if r.reliable { "reliable" } else { "UNRELIABLE" },
        if r.shortcut { ", complete graph" } else { "" }
    ));
    let outcome = if r.reliable { Outcome::Ok } else { Outcome::Unreliable };
    Ok(Report { json: to_value(&r)?, summary, outcome })
}

fn certificate_report(cert: Certificate) -> Result<Report> {
    let verdict = match cert.verdict {
        Verdict::Verified => "verified",
        Verdict::Refuted => "refuted",
        Verdict::Unreliable => "unreliable",
    };
    let summary = format!("{verdict}: {}", cert.note);
    let outcome = match cert.verdict {
        Verdict::Verified => Outcome::Ok,
        Verdict::Refuted => Outcome::Negative,
        Verdict::Unreliable => Outcome::Unreliable,
    };
    Ok(Report { json: to_value(&cert)?, summary, outcome })
}

fn build_step(a: &OperationArgs, g: &Graph, d: Dimension) -> Result<(Graph, ConstructionStep)> {
    if let Some(p) = &a.step {
        let step: ConstructionStep = serde_json::from_str(&std::fs::read_to_string(p)?)?;
        return step.replay(g);
    }
    let need = |what: &str| Error::InvalidOperation(format!("missing --{what}"));
    let x = || a.x.ok_or_else(|| need("x"));
    match a.kind.expect("clap requires --kind or --step") {
        OpKind::ZeroExtension => ops::zero_extension(g, d, &a.neighbors),
        OpKind::OneExtension => ops::one_extension(g, d, a.removed.ok_or_else(|| need("removed"))?, &a.extra),
        OpKind::VertexSplit => ops::vertex_split(g, d, x()?, &a.n1, &a.n2, &a.w),
        OpKind::SpiderSplit => ops::spider_split(g, d, x()?, &a.n1, &a.n2, &a.w),
        OpKind::XReplacement | OpKind::VReplacement => {
            let kind = if matches!(a.kind, Some(OpKind::XReplacement)) { ReplacementKind::X } else { ReplacementKind::V };
            ops::xv_replacement(g, d, kind, a.e.ok_or_else(|| need("e"))?, a.f.ok_or_else(|| need("f"))?, &a.extra)
        }
        OpKind::EdgeContraction => {
            let (kept, removed) = a.contract.ok_or_else(|| need("contract"))?;
            ops::edge_contraction(g, d, kept, removed)
        }
    }
}

fn certify(what: &CertifyCommand, common: &Common) -> Result<Report> {
    let cfg = engine_config(common)?;
    let cert = match what {
        CertifyCommand::Sphere { triangulation, count_up_to } => {
            if common.d.is_some_and(|d| d != 3) {
                return Err(Error::InvalidOperation("sphere certificates are for d = 3".into()));
            }
            let t = load(triangulation)?.triangulation()?;
            certificates::certify_sphere_bound(&t, *count_up_to, &cfg)?
        }
        CertifyCommand::Divides { g, h } => {
            certificates::check_spanning_divisibility(&load(g)?.graph, &load(h)?.graph, dimension(common)?, &cfg)?
        }
        CertifyCommand::Subgraph { g, h } => {
            let g = load(g)?.graph;
            let h = load(h)?.graph;
            // a smaller vertex count means H lists only its own ids, which are G's ids
            let h = if h.n() < g.n() { Graph::from_edges(g.n(), h.edges())? } else { h };
            certificates::check_subgraph_divisibility(&g, &h, dimension(common)?, &cfg)?
        }
        CertifyCommand::EdgeDrop { graph, edge } => {
            certificates::check_edge_addition_drop(&load(graph)?.graph, *edge, dimension(common)?, &cfg)?
        }
        CertifyCommand::Augment { graph, max_counts } => {
            certificates::greedy_augment(&load(graph)?.graph, dimension(common)?, *max_counts, &cfg)?
        }
        CertifyCommand::Operation(a) => {
            let before = load(&a.graph)?.graph;
            let d = dimension(common)?;
            let (after, step) = build_step(a, &before, d)?;
            if step.d != d.get() {
                return Err(Error::InvalidOperation(format!("step is for d = {}, not {d}", step.d)));
            }
            certificates::verify_operation_effect(&step, &before, &after, &cfg)?
        }
    };
    certificate_report(cert)
}

fn verify(path: &Path) -> Result<Report> {
    let cert: Certificate = serde_json::from_str(&std::fs::read_to_string(path)?)?;
    let r = certificates::verify_certificate(&cert)?;
    let ok = r.hashes_match && r.reproduced;
    let summary = format!(
        "{}: {}",
        path.display(),
        if ok { "reproduced" } else if !r.hashes_match { "graph hashes do not match" } else { "recomputation differs" }
    );
    Ok(Report { json: to_value(&r)?, summary, outcome: if ok { Outcome::Ok } else { Outcome::Negative } })
}

fn run(cli: &Cli, common: &Common) -> Result<Report> {
    match &cli.command {
        Command::Rigid { graph } => rigid(graph, common),
        Command::Count { graph, real_samples } => count(graph, *real_samples, common),
        Command::Certify { what } => certify(what, common),
        Command::Verify { certificate } => verify(certificate),
    }
}

fn pretty(v: &Value) -> String {
    serde_json::to_string_pretty(v).expect("JSON values serialize")
}

// A closed stdout (say, piping into `head`) is not worth a panic.
fn emit(text: &str) {
    let _ = writeln!(std::io::stdout().lock(), "{text}");
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let common = cli.common.clone();
    match run(&cli, &common) {
        Ok(report) => {
            let text = pretty(&report.json);
            if let Some(out) = &common.out {
                if let Err(e) = std::fs::write(out, format!("{text}\n")) {
                    return fail(&Error::Io(e), &common);
                }
            }
            emit(if common.json { &text } else { &report.summary });
            report.outcome.code()
        }
        Err(e) => fail(&e, &common),
    }
}

fn fail(e: &Error, common: &Common) -> ExitCode {
    if common.json {
        emit(&pretty(&json!({ "error": { "reason": e.reason(), "message": e.to_string() } })));
    } else {
        eprintln!("error [{}]: {e}", e.reason());
    }
    ExitCode::from(2)
}
