//! Command-line front end: reproducible experiments over edge-list graph
//! files with structured JSON reports.
//!
//! Reports are a pure function of the flags, so identical invocations
//! produce byte-identical output. Exit codes: 0 on success, 1 on simulation
//! or generation faults, 2 on usage errors.

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use distest::bipartite::{run_bipartite_test, run_bipartite_trials, BipartiteParams};
use distest::cycle::{run_cycle_test, run_cycle_trials, CycleParams};
use distest::emulation::{checker_by_name, emulate, emulate_trials, EmulationParams};
use distest::generators::{far_instance, gnp, lower_bound_instance, LowerBoundParams};
use distest::oracle::{certify, CertVerdict, Certification, Model, Property};
use distest::triangle::{run_triangle_test, run_triangle_trials, TriangleParams};
use distest::{DegreeBound, Graph, RejectionStats, SimConfig, Transcript};

#[derive(Parser)]
#[command(
    name = "distest",
    about = "Distributed property tests on a simulated CONGEST network",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one algorithm once and print its transcript report.
    Run(RunArgs),
    /// Run seeded independent trials and print rejection statistics.
    Trials(TrialsArgs),
    /// Generate a graph file (with a certificate sidecar where applicable).
    Gen(GenArgs),
    /// Certify a graph's distance from a property.
    Oracle(OracleArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Algorithm {
    Emulate,
    Triangle,
    Bipartite,
    Cycle,
}

impl Algorithm {
    fn name(self) -> &'static str {
        match self {
            Algorithm::Emulate => "emulate",
            Algorithm::Triangle => "triangle",
            Algorithm::Bipartite => "bipartite",
            Algorithm::Cycle => "cycle",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum WalkMode {
    PaperFaithful,
    Scaled,
}

#[derive(Args)]
struct AlgoArgs {
    /// Which distributed test to run.
    #[arg(long)]
    algorithm: Algorithm,
    /// Edge-list graph file ("n m" header, then one "u v" line per edge).
    #[arg(long)]
    graph: PathBuf,
    /// Distance parameter of the test.
    #[arg(long)]
    epsilon: Option<f64>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Query-complexity parameter of the emulated test (emulate).
    #[arg(long)]
    q: Option<u32>,
    /// Witness checker name, e.g. "k-colorability:2" or "perfect" (emulate).
    #[arg(long)]
    checker: Option<String>,
    /// Degree bound (bipartite).
    #[arg(long)]
    d: Option<u32>,
    /// Parameter mode for the bipartite test.
    #[arg(long, value_enum, default_value_t = WalkMode::Scaled)]
    mode: WalkMode,
    /// Walk length L (bipartite, scaled mode).
    #[arg(long)]
    walk_length: Option<u64>,
    /// Outer iterations (bipartite, scaled mode).
    #[arg(long)]
    eta: Option<u64>,
    /// Base of the logarithm in the cycle test's phase lengths.
    #[arg(long, default_value_t = 2.0)]
    log_base: f64,
    /// Test hook: disable edge deletion in the cycle test.
    #[arg(long)]
    force_no_deletion: bool,
    /// Escape hatch: full parameter record as JSON, replacing the flags.
    #[arg(long)]
    params_json: Option<String>,
    /// Write the report here instead of stdout.
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct RunArgs {
    #[command(flatten)]
    algo: AlgoArgs,
}

#[derive(Args)]
struct TrialsArgs {
    #[command(flatten)]
    algo: AlgoArgs,
    #[arg(long)]
    trials: u32,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum GenKind {
    /// G(n, p) random graph.
    Gnp,
    /// Certified epsilon-far instance for a property.
    Far,
    /// Trimmed random graph: degree cap plus short-cycle breaking.
    LowerBound,
}

#[derive(Args)]
struct GenArgs {
    #[arg(long, value_enum)]
    kind: GenKind,
    #[arg(long)]
    n: usize,
    /// Edge probability (gnp).
    #[arg(long)]
    p: Option<f64>,
    /// Target property (far, lower-bound certification).
    #[arg(long)]
    property: Option<String>,
    #[arg(long)]
    epsilon: Option<f64>,
    /// Distance model: dense, general, or sparse.
    #[arg(long)]
    model: Option<String>,
    /// Degree bound for the sparse model.
    #[arg(long)]
    d: Option<u32>,
    /// Expected-degree numerator: edges appear with probability c/n
    /// (lower-bound).
    #[arg(long)]
    c: Option<f64>,
    /// Degree cap of the trimming stage (lower-bound; default 2c).
    #[arg(long)]
    degree_cap: Option<u32>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Where to write the edge list; the certificate sidecar gets
    /// "<output>.cert.json".
    #[arg(long)]
    output: PathBuf,
}

#[derive(Args)]
struct OracleArgs {
    #[arg(long)]
    graph: PathBuf,
    #[arg(long)]
    property: String,
    #[arg(long)]
    epsilon: f64,
    #[arg(long, default_value = "general")]
    model: String,
    #[arg(long)]
    d: Option<u32>,
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Serialize)]
struct RunReport {
    command: &'static str,
    algorithm: String,
    graph: String,
    n: usize,
    m: usize,
    seed: u64,
    params: serde_json::Value,
    transcript: Transcript,
    #[serde(skip_serializing_if = "Option::is_none")]
    certificate: Option<serde_json::Value>,
}

#[derive(Serialize)]
struct TrialsReport {
    command: &'static str,
    algorithm: String,
    graph: String,
    n: usize,
    m: usize,
    seed: u64,
    trials: u32,
    params: serde_json::Value,
    stats: RejectionStats,
    #[serde(skip_serializing_if = "Option::is_none")]
    certificate: Option<serde_json::Value>,
}

#[derive(Serialize)]
struct GenReport {
    command: &'static str,
    kind: String,
    n: usize,
    m: usize,
    seed_used: u64,
    output: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    certificate_file: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    construction: Option<serde_json::Value>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run(args) => cmd_run(args),
        Command::Trials(args) => cmd_trials(args),
        Command::Gen(args) => cmd_gen(args),
        Command::Oracle(args) => cmd_oracle(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        // Bad or missing parameters are usage errors (exit 2, like flag
        // parse failures); faults and I/O problems exit 1.
        Err(e @ distest::Error::InvalidConfig(_)) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}

fn load_graph(path: &Path) -> Result<Graph, distest::Error> {
    let text = std::fs::read_to_string(path)?;
    Graph::parse_edge_list(&text)
}

/// The sidecar certificate written by `gen`, if present next to the graph.
fn sidecar_certificate(graph_path: &Path) -> Option<serde_json::Value> {
    let path = sidecar_path(graph_path);
    let text = std::fs::read_to_string(path).ok()?;
    serde_json::from_str(&text).ok()
}

fn sidecar_path(graph_path: &Path) -> PathBuf {
    let mut name = graph_path.as_os_str().to_owned();
    name.push(".cert.json");
    PathBuf::from(name)
}

fn emit(text: String, output: Option<&Path>) -> Result<(), distest::Error> {
    use std::io::Write;
    match output {
        Some(path) => std::fs::write(path, text + "\n")?,
        None => {
            let mut out = std::io::stdout().lock();
            if let Err(e) = writeln!(out, "{text}") {
                // Downstream consumers may close the pipe early.
                if e.kind() != std::io::ErrorKind::BrokenPipe {
                    return Err(e.into());
                }
            }
        }
    }
    Ok(())
}

fn require<T: Copy>(value: Option<T>, what: &str, algo: Algorithm) -> Result<T, distest::Error> {
    value.ok_or_else(|| {
        distest::Error::InvalidConfig(format!("--{what} is required for --algorithm {}", algo.name()))
    })
}

enum Params {
    Emulate(EmulationParams, String),
    Triangle(TriangleParams),
    Bipartite(BipartiteParams),
    Cycle(CycleParams),
}

impl Params {
    fn to_json(&self) -> serde_json::Value {
        match self {
            Params::Emulate(p, checker) => {
                let mut v = serde_json::to_value(p).expect("params serialize");
                v["checker"] = serde_json::Value::String(checker.clone());
                v
            }
            Params::Triangle(p) => serde_json::to_value(p).expect("params serialize"),
            Params::Bipartite(p) => serde_json::to_value(p).expect("params serialize"),
            Params::Cycle(p) => serde_json::to_value(p).expect("params serialize"),
        }
    }
}

fn build_params(args: &AlgoArgs, g: &Graph) -> Result<Params, distest::Error> {
    let from_json = |raw: &str| -> Result<serde_json::Value, distest::Error> {
        serde_json::from_str(raw)
            .map_err(|e| distest::Error::InvalidConfig(format!("bad --params-json: {e}")))
    };
    match args.algorithm {
        Algorithm::Emulate => {
            let checker = args
                .checker
                .clone()
                .unwrap_or_else(|| "k-colorability:2".to_owned());
            let params = match &args.params_json {
                Some(raw) => serde_json::from_value(from_json(raw)?)
                    .map_err(|e| distest::Error::InvalidConfig(format!("bad --params-json: {e}")))?,
                None => EmulationParams::new(require(args.q, "q", args.algorithm)?, g.n())?,
            };
            Ok(Params::Emulate(params, checker))
        }
        Algorithm::Triangle => {
            let params = match &args.params_json {
                Some(raw) => serde_json::from_value(from_json(raw)?)
                    .map_err(|e| distest::Error::InvalidConfig(format!("bad --params-json: {e}")))?,
                None => TriangleParams::new(require(args.epsilon, "epsilon", args.algorithm)?)?,
            };
            Ok(Params::Triangle(params))
        }
        Algorithm::Bipartite => {
            let params = match &args.params_json {
                Some(raw) => serde_json::from_value(from_json(raw)?)
                    .map_err(|e| distest::Error::InvalidConfig(format!("bad --params-json: {e}")))?,
                None => {
                    let d = require(args.d, "d", args.algorithm)?;
                    let epsilon = require(args.epsilon, "epsilon", args.algorithm)?;
                    match args.mode {
                        WalkMode::Scaled => BipartiteParams::scaled(
                            g.n(),
                            d,
                            epsilon,
                            require(args.walk_length, "walk-length", args.algorithm)?,
                            require(args.eta, "eta", args.algorithm)?,
                        )?,
                        WalkMode::PaperFaithful => {
                            BipartiteParams::paper_faithful(g.n(), d, epsilon)?
                        }
                    }
                }
            };
            Ok(Params::Bipartite(params))
        }
        Algorithm::Cycle => {
            let params = match &args.params_json {
                Some(raw) => serde_json::from_value(from_json(raw)?)
                    .map_err(|e| distest::Error::InvalidConfig(format!("bad --params-json: {e}")))?,
                None => CycleParams::with_log_base(
                    g.n(),
                    require(args.epsilon, "epsilon", args.algorithm)?,
                    args.log_base,
                )?
                .with_force_no_deletion(args.force_no_deletion),
            };
            Ok(Params::Cycle(params))
        }
    }
}

fn cmd_run(args: RunArgs) -> Result<(), distest::Error> {
    let a = &args.algo;
    let g = load_graph(&a.graph)?;
    let params = build_params(a, &g)?;
    let cfg = SimConfig::new(a.seed);
    let transcript = match &params {
        Params::Emulate(p, checker) => emulate(&g, checker_by_name(checker)?, p, &cfg)?,
        Params::Triangle(p) => run_triangle_test(&g, p, &cfg)?,
        Params::Bipartite(p) => run_bipartite_test(&g, p, &cfg)?,
        Params::Cycle(p) => run_cycle_test(&g, p, &cfg)?,
    };
    let report = RunReport {
        command: "run",
        algorithm: a.algorithm.name().to_owned(),
        graph: a.graph.display().to_string(),
        n: g.n(),
        m: g.m(),
        seed: a.seed,
        params: params.to_json(),
        transcript,
        certificate: sidecar_certificate(&a.graph),
    };
    emit(serde_json::to_string_pretty(&report).expect("report serialize"), a.output.as_deref())
}

fn cmd_trials(args: TrialsArgs) -> Result<(), distest::Error> {
    let a = &args.algo;
    let g = load_graph(&a.graph)?;
    let params = build_params(a, &g)?;
    let cfg = SimConfig::new(a.seed);
    let stats = match &params {
        Params::Emulate(p, checker) => {
            emulate_trials(&g, checker_by_name(checker)?, p, &cfg, args.trials)?
        }
        Params::Triangle(p) => run_triangle_trials(&g, p, &cfg, args.trials)?,
        Params::Bipartite(p) => run_bipartite_trials(&g, p, &cfg, args.trials)?,
        Params::Cycle(p) => run_cycle_trials(&g, p, &cfg, args.trials)?,
    };
    let report = TrialsReport {
        command: "trials",
        algorithm: a.algorithm.name().to_owned(),
        graph: a.graph.display().to_string(),
        n: g.n(),
        m: g.m(),
        seed: a.seed,
        trials: args.trials,
        params: params.to_json(),
        stats,
        certificate: sidecar_certificate(&a.graph),
    };
    emit(serde_json::to_string_pretty(&report).expect("report serialize"), a.output.as_deref())
}

fn parse_model(raw: Option<&str>) -> Result<Model, distest::Error> {
    Model::from_str(raw.unwrap_or("general"))
}

fn cmd_gen(args: GenArgs) -> Result<(), distest::Error> {
    let mut certificate_file = None;
    let mut construction = None;
    let (g, seed_used, certification): (Graph, u64, Option<Certification>) = match args.kind {
        GenKind::Gnp => {
            let p = args
                .p
                .ok_or_else(|| distest::Error::InvalidConfig("--p is required for gnp".into()))?;
            (gnp(args.n, p, args.seed), args.seed, None)
        }
        GenKind::Far => {
            let property: Property = args
                .property
                .as_deref()
                .ok_or_else(|| {
                    distest::Error::InvalidConfig("--property is required for far".into())
                })?
                .parse()?;
            let epsilon = args.epsilon.ok_or_else(|| {
                distest::Error::InvalidConfig("--epsilon is required for far".into())
            })?;
            let model = parse_model(args.model.as_deref())?;
            let d = args.d.map(DegreeBound);
            let (g, cert) = far_instance(property, args.n, epsilon, model, d, args.seed)?;
            (g, args.seed, Some(cert))
        }
        GenKind::LowerBound => {
            let c = args.c.unwrap_or(8.0);
            let cap = args.degree_cap.unwrap_or((2.0 * c).ceil() as u32);
            let params = LowerBoundParams::new(args.n, c, cap)?;
            // With a target epsilon the instance is regenerated until the
            // oracle certifies it far.
            if let Some(epsilon) = args.epsilon {
                let property: Property =
                    args.property.as_deref().unwrap_or("bipartite").parse()?;
                let model = parse_model(args.model.as_deref())?;
                let d = args.d.map(DegreeBound);
                let mut found = None;
                for attempt in 0..32u64 {
                    let seed = args.seed.wrapping_add(attempt);
                    let (g, log) = lower_bound_instance(&params, seed)?;
                    let cert = certify(&g, property, epsilon, model, d)?;
                    if cert.verdict == CertVerdict::EpsilonFar {
                        found = Some((g, seed, cert, log));
                        break;
                    }
                }
                let (g, seed, cert, log) = found.ok_or(distest::Error::GenerationFailed {
                    attempts: 32,
                    msg: format!("no construction certified {epsilon}-far at n = {}", args.n),
                })?;
                construction = Some(serde_json::json!({
                    "initial_edges": log.initial_edges,
                    "removed_high_degree": log.removed_high_degree.len(),
                    "removed_cycle_break": log.removed_cycle_break.len(),
                    "final_edges": log.final_edges,
                }));
                (g, seed, Some(cert))
            } else {
                let (g, log) = lower_bound_instance(&params, args.seed)?;
                construction = Some(serde_json::json!({
                    "initial_edges": log.initial_edges,
                    "removed_high_degree": log.removed_high_degree.len(),
                    "removed_cycle_break": log.removed_cycle_break.len(),
                    "final_edges": log.final_edges,
                }));
                (g, args.seed, None)
            }
        }
    };

    std::fs::write(&args.output, g.to_edge_list())?;
    if let Some(cert) = &certification {
        let sidecar = serde_json::json!({
            "epsilon": args.epsilon,
            "verdict": cert.verdict,
            "certificate": cert.certificate,
        });
        let path = sidecar_path(&args.output);
        std::fs::write(
            &path,
            serde_json::to_string_pretty(&sidecar).expect("certificate serialize") + "\n",
        )?;
        certificate_file = Some(path.display().to_string());
    }

    let report = GenReport {
        command: "gen",
        kind: format!("{:?}", args.kind).to_lowercase(),
        n: g.n(),
        m: g.m(),
        seed_used,
        output: args.output.display().to_string(),
        certificate_file,
        construction,
    };
    emit(
        serde_json::to_string_pretty(&report).expect("report serialize"),
        None,
    )
}

fn cmd_oracle(args: OracleArgs) -> Result<(), distest::Error> {
    let g = load_graph(&args.graph)?;
    let property: Property = args.property.parse()?;
    let model = parse_model(Some(&args.model))?;
    let certification = certify(&g, property, args.epsilon, model, args.d.map(DegreeBound))?;
    emit(
        serde_json::to_string_pretty(&certification).expect("certificate serialize"),
        args.output.as_deref(),
    )
}
