//! `dobrushin-lab`: command-line access to bounds, interdependence
//! matrices, self-bounding checks, convex distances, coupled chains and
//! Monte Carlo experiments.
//!
//! Exit status is 0 on success, 1 on error and 2 when `--strict` is given
//! and a hypothesis (or a verification) fails.

use std::fs::File;
use std::io::{self, BufReader, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Map, Value};

use dobrushin_core::bounds::{
    ac_residual, application_tails, constant_composition_checks, convex_distance_rate, k_c, nonuniform_tail,
    solve_ac, tail_lower, tail_upper_star, tail_upper_weak, ApplicationBound, BoundSpec, TailCurve,
    INDEPENDENT_CONVEX_RATE, SWR_CONVEX_RATE,
};
use dobrushin_core::convexdist::{convex_distance, dt_squared_lipschitz_check, ConvexDistanceInstance};
use dobrushin_core::dobrushin::{
    curie_weiss_matrix, exact_matrix, inhomogeneity_exact, verify_interdependence, InterdependenceMatrix, SubsetLaw,
};
use dobrushin_core::finite_dist::FiniteDistribution;
use dobrushin_core::harness::{
    coupling_statistics, curie_weiss_certified_matrix, run_experiment, ExperimentConfig, ExperimentReport,
};
use dobrushin_core::models::coupling::contraction_envelope;
use dobrushin_core::models::curie_weiss::CurieWeiss;
use dobrushin_core::models::ergm::EdgeTriangleErgm;
use dobrushin_core::models::graph::{edge_slots, EdgeGraph, GraphMotif};
use dobrushin_core::selfbounding::{
    negative_spin_count, negative_spin_witness, subgraph_scale, subgraph_witness, verify_star, VerificationReport,
    Variant, WitnessedFunction,
};
use dobrushin_core::space::ProductSpace;

#[derive(Parser)]
#[command(name = "dobrushin-lab", version, about = "Concentration bounds under Dobrushin-type dependence")]
struct Cli {
    /// Worker threads (defaults to all cores). Results do not depend on it.
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Closed-form tail bounds and constants.
    Bounds {
        #[command(subcommand)]
        action: BoundsAction,
    },
    /// Interdependence matrices.
    Dobrushin {
        #[command(subcommand)]
        action: DobrushinAction,
    },
    /// Exhaustive self-bounding checks.
    Selfbound {
        #[command(subcommand)]
        action: SelfboundAction,
    },
    /// Run a Monte Carlo experiment and compare tail frequencies with bounds.
    Simulate(SimulateArgs),
    /// Convex distance computations.
    Convexdist {
        #[command(subcommand)]
        action: ConvexAction,
    },
    /// Coupled Glauber chains for the Curie-Weiss model.
    Coupling {
        #[command(subcommand)]
        action: CouplingAction,
    },
    /// Re-render a saved JSON report.
    Report {
        #[command(subcommand)]
        action: ReportAction,
    },
}

#[derive(Subcommand)]
enum BoundsAction {
    /// Evaluate a tail curve; writes CSV `t,bound`.
    Eval(BoundsEvalArgs),
    /// Print the exponent-rate constants and their composition checks as JSON.
    Constants,
}

#[derive(Clone, Copy, ValueEnum)]
enum Curve {
    StarUpper,
    WeakUpper,
    Lower,
    Nonuniform,
    Tsp,
    Steiner,
    CwUp,
    CwLow,
    SubgraphUp,
    SubgraphLow,
    SwrConvex,
    SwrTsp,
}

#[derive(Args)]
struct BoundsEvalArgs {
    #[arg(long, value_enum)]
    curve: Curve,
    /// Comma-separated ascending thresholds.
    #[arg(long, value_delimiter = ',', required = true)]
    thresholds: Vec<f64>,
    #[arg(long, default_value_t = 1.0)]
    a: f64,
    #[arg(long, default_value_t = 0.0)]
    b: f64,
    /// `E g` for the self-bounding curves.
    #[arg(long, default_value_t = 1.0)]
    mean: f64,
    /// `‖A‖₁`.
    #[arg(long, default_value_t = 0.0)]
    norm1: f64,
    #[arg(long, default_value_t = 0.0)]
    rho: f64,
    #[arg(long, default_value_t = 1.0)]
    cost_ratio: f64,
    /// Difference budget `C` for the sampling curves.
    #[arg(long, default_value_t = 1.0)]
    c_budget: f64,
    #[arg(long, default_value_t = 0.5)]
    beta: f64,
    #[arg(long, default_value_t = 0.0)]
    h: f64,
    #[arg(long, default_value_t = 100)]
    n: usize,
    #[arg(long, default_value_t = 3)]
    motif_vertices: usize,
    #[arg(long, default_value_t = 3)]
    motif_edges: usize,
    #[arg(long, default_value_t = 1.0)]
    mean_count: f64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum DobrushinAction {
    /// Compute a matrix; writes CSV (a `n,norm_1,norm_inf,norm_2` record,
    /// then one record per matrix row) and prints the norms to stderr.
    Compute(DobrushinArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum MatrixModel {
    Cw,
    Ergm,
    Swr,
}

#[derive(Args)]
struct DobrushinArgs {
    #[arg(long, value_enum)]
    model: MatrixModel,
    #[arg(long)]
    n: usize,
    #[arg(long, default_value_t = 0.5)]
    beta: f64,
    #[arg(long, default_value_t = 0.0)]
    h: f64,
    #[arg(long, default_value_t = 0.0)]
    beta1: f64,
    #[arg(long, default_value_t = 0.0)]
    beta2: f64,
    /// Universe size for sampling without replacement.
    #[arg(long)]
    universe: Option<usize>,
    /// Comma-separated sampling weights (uniform when absent).
    #[arg(long, value_delimiter = ',')]
    weights: Option<Vec<f64>>,
    /// Use the closed-form Curie-Weiss matrix instead of enumeration.
    #[arg(long)]
    analytic: bool,
    /// Also check the matrix over all pairs of states.
    #[arg(long)]
    verify: bool,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Exit with status 2 if `‖A‖₁ ≥ 1` or verification fails.
    #[arg(long)]
    strict: bool,
}

#[derive(Subcommand)]
enum SelfboundAction {
    /// Verify a built-in witnessed function; prints a JSON report.
    Verify(SelfboundArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum Witnessed {
    /// Number of negative spins on `{-1,1}^n`, a `(1,0)`-* function.
    NegativeSpins,
    /// Scaled motif count on graphs with `n` vertices, an `(e_S,0)`-* function.
    Motif,
    /// Squared convex distance to a set in `{0,1}^n`, weakly `(4,0)`-*.
    DtSquared,
}

#[derive(Clone, Copy, ValueEnum)]
enum MotifShape {
    Edge,
    Triangle,
    Path,
    Cycle,
}

#[derive(Args)]
struct SelfboundArgs {
    #[arg(long, value_enum)]
    function: Witnessed,
    #[arg(long)]
    n: usize,
    #[arg(long, value_enum, default_value = "triangle")]
    motif: MotifShape,
    /// Vertices of a path or cycle motif.
    #[arg(long, default_value_t = 3)]
    motif_size: usize,
    /// Points of the set for `dt-squared`, e.g. `--point 0,0,1 --point 1,1,0`.
    #[arg(long, value_parser = parse_point)]
    point: Vec<Vec<usize>>,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Exit with status 2 if the verification fails.
    #[arg(long)]
    strict: bool,
}

#[derive(Args)]
struct SimulateArgs {
    /// Experiment kind: cw, ergm, tsp, steiner, swr, convex or coupling.
    kind: String,
    /// JSON configuration; the flags below override it.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    replicas: Option<usize>,
    #[arg(long, value_delimiter = ',')]
    thresholds: Option<Vec<f64>>,
    #[arg(long)]
    burn_in: Option<usize>,
    #[arg(long)]
    thinning: Option<usize>,
    #[arg(long)]
    chains: Option<usize>,
    #[arg(long)]
    confidence: Option<f64>,
    /// Model parameter override `key=value`; the value is read as JSON when
    /// possible (e.g. `--set n=100 --set 'points={"layout":"grid","cols":8,"rows":5}'`).
    #[arg(long = "set", value_name = "KEY=VALUE")]
    sets: Vec<String>,
    /// Report CSV (stdout when absent).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Plot data `curve,t,empirical,ci_low,ci_high,bound`.
    #[arg(long)]
    plot: Option<PathBuf>,
    /// Full JSON report, readable by `report render`.
    #[arg(long)]
    json: Option<PathBuf>,
    /// Exit with status 2 if a hypothesis of the bounds fails.
    #[arg(long)]
    strict: bool,
}

#[derive(Subcommand)]
enum ConvexAction {
    /// Solve one instance; writes CSV `component,index,value`.
    Solve(ConvexArgs),
}

#[derive(Args)]
struct ConvexArgs {
    /// JSON instance `{"x": [...], "S": [[...], ...]}`; flags override it.
    #[arg(long)]
    instance: Option<PathBuf>,
    #[arg(long, value_delimiter = ',')]
    x: Option<Vec<usize>>,
    /// One point of `S`, comma-separated; repeat for more.
    #[arg(long, value_parser = parse_point)]
    point: Vec<Vec<usize>>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    json: Option<PathBuf>,
}

#[derive(Subcommand)]
enum CouplingAction {
    /// Mean disagreements of chains started from all +1 and all -1;
    /// writes CSV `k,mean,std_err,envelope,open_fraction`.
    Run(CouplingArgs),
}

#[derive(Args)]
struct CouplingArgs {
    #[arg(long)]
    n: usize,
    #[arg(long)]
    beta: f64,
    #[arg(long, default_value_t = 0.0)]
    h: f64,
    #[arg(long, value_delimiter = ',', default_value = "0,10,50,100")]
    steps: Vec<usize>,
    #[arg(long, default_value_t = 10_000)]
    runs: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Exit with status 2 if `‖A‖₁ ≥ 1`.
    #[arg(long)]
    strict: bool,
}

#[derive(Subcommand)]
enum ReportAction {
    /// Render a JSON report as a summary, CSV, plot data or JSON.
    Render(RenderArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum RenderFormat {
    Summary,
    Csv,
    Plot,
    Json,
}

#[derive(Args)]
struct RenderArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long, value_enum, default_value = "summary")]
    format: RenderFormat,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Exit with status 2 if the report's hypotheses were violated.
    #[arg(long)]
    strict: bool,
}

/// Exit status of a successful run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Status {
    Ok,
    Violated,
}

fn status(strict: bool, violated: bool) -> Status {
    if strict && violated {
        Status::Violated
    } else {
        Status::Ok
    }
}

fn sink(out: &Option<PathBuf>) -> Result<Box<dyn Write>> {
    Ok(match out {
        Some(p) => Box::new(File::create(p).with_context(|| format!("creating {}", p.display()))?),
        None => Box::new(io::stdout().lock()),
    })
}

fn open(path: &Path) -> Result<BufReader<File>> {
    Ok(BufReader::new(File::open(path).with_context(|| format!("opening {}", path.display()))?))
}

fn bounds_eval(a: &BoundsEvalArgs) -> Result<Status> {
    let spec = || BoundSpec::new(a.a, a.b, a.mean, a.norm1);
    let curve = match a.curve {
        Curve::StarUpper => {
            let s = spec()?;
            TailCurve::evaluate(&a.thresholds, |t| tail_upper_star(t, &s))?
        }
        Curve::WeakUpper => {
            let s = spec()?;
            TailCurve::evaluate(&a.thresholds, |t| tail_upper_weak(t, &s))?
        }
        Curve::Lower => {
            let s = spec()?;
            TailCurve::evaluate(&a.thresholds, |t| tail_lower(t, &s))?
        }
        Curve::Nonuniform => TailCurve::evaluate(&a.thresholds, |t| nonuniform_tail(t, a.c_budget, a.norm1))?,
        _ => {
            let which = match a.curve {
                Curve::Tsp => ApplicationBound::Tsp { rho: a.rho, cost_ratio: a.cost_ratio },
                Curve::Steiner => ApplicationBound::Steiner { rho: a.rho },
                Curve::CwUp => ApplicationBound::CwUp { beta: a.beta, h: a.h, n: a.n },
                Curve::CwLow => ApplicationBound::CwLow { beta: a.beta, h: a.h, n: a.n },
                Curve::SubgraphUp | Curve::SubgraphLow => {
                    let (norm1, n, motif_vertices, motif_edges, mean_count) =
                        (a.norm1, a.n, a.motif_vertices, a.motif_edges, a.mean_count);
                    if matches!(a.curve, Curve::SubgraphUp) {
                        ApplicationBound::SubgraphUp { norm1, n, motif_vertices, motif_edges, mean_count }
                    } else {
                        ApplicationBound::SubgraphLow { norm1, n, motif_vertices, motif_edges, mean_count }
                    }
                }
                Curve::SwrConvex => ApplicationBound::SwrConvex { c_budget: a.c_budget },
                Curve::SwrTsp => ApplicationBound::SwrTsp { cost_ratio: a.cost_ratio },
                _ => unreachable!("handled above"),
            };
            application_tails(&which, &a.thresholds)?
        }
    };
    curve.write_csv(sink(&a.out)?)?;
    Ok(Status::Ok)
}

fn bounds_constants() -> Result<Status> {
    let ac = solve_ac();
    let report = json!({
        "a_c": ac,
        "a_c_residual": ac_residual(ac),
        "k_c": k_c(),
        "convex_rate_independent": convex_distance_rate(0.0)?,
        "convex_rate_independent_reference": INDEPENDENT_CONVEX_RATE,
        "convex_rate_uniform_sampling": SWR_CONVEX_RATE,
        "composition": constant_composition_checks(),
    });
    println!("{}", serde_json::to_string_pretty(&report)?);
    Ok(Status::Ok)
}

fn write_matrix(m: &InterdependenceMatrix, out: &Option<PathBuf>) -> Result<()> {
    m.write_csv(sink(out)?)?;
    eprintln!("n={} ‖A‖₁={} ‖A‖∞={} ‖A‖₂={}", m.n(), m.norm_1, m.norm_inf, m.norm_2);
    Ok(())
}

fn dobrushin_compute(a: &DobrushinArgs) -> Result<Status> {
    let (matrix, verified) = match a.model {
        MatrixModel::Cw => {
            let model = CurieWeiss::new(a.n, a.beta, a.h)?;
            let m = if a.analytic { curie_weiss_matrix(a.n, a.beta)? } else { exact_matrix(&model)? };
            let v = if a.verify { Some(verify_interdependence(&model, &m, 1e-12)?) } else { None };
            (m, v)
        }
        MatrixModel::Ergm => {
            let model = EdgeTriangleErgm::new(a.n, a.beta1, a.beta2)?;
            let m = exact_matrix(&model)?;
            let v = if a.verify { Some(verify_interdependence(&model, &m, 1e-12)?) } else { None };
            (m, v)
        }
        MatrixModel::Swr => {
            let universe = a.universe.context("--universe is required for sampling without replacement")?;
            let law = match &a.weights {
                Some(w) => {
                    if w.len() != universe {
                        bail!("{} weights given for a universe of {universe}", w.len());
                    }
                    SubsetLaw::weighted_sampling(&FiniteDistribution::from_weights(w)?, a.n)?
                }
                None => SubsetLaw::uniform(universe, a.n)?,
            };
            let model = law.coordinate_model();
            let m = exact_matrix(&model)?;
            eprintln!("ρ={}", inhomogeneity_exact(&law)?.rho);
            let v = if a.verify { Some(verify_interdependence(&model, &m, 1e-12)?) } else { None };
            (m, v)
        }
    };
    write_matrix(&matrix, &a.out)?;
    let mut violated = !matrix.satisfies_dobrushin();
    if let Some(v) = verified {
        eprintln!("pairwise check: holds={} max_excess={} pairs={}", v.holds, v.max_excess, v.checked_pairs);
        violated |= !v.holds;
    }
    Ok(status(a.strict, violated))
}

fn motif(a: &SelfboundArgs) -> Result<GraphMotif> {
    Ok(match a.motif {
        MotifShape::Edge => GraphMotif::edge(),
        MotifShape::Triangle => GraphMotif::triangle(),
        MotifShape::Path => GraphMotif::path(a.motif_size)?,
        MotifShape::Cycle => GraphMotif::cycle(a.motif_size)?,
    })
}

fn selfbound_verify(a: &SelfboundArgs) -> Result<Status> {
    let report: VerificationReport = match a.function {
        Witnessed::NegativeSpins => {
            let w = WitnessedFunction {
                g: negative_spin_count,
                alpha: negative_spin_witness,
                a: 1.0,
                b: 0.0,
                variant: Variant::Star,
            };
            verify_star(&w, &ProductSpace::binary(a.n))?
        }
        Witnessed::Motif => {
            let m = motif(a)?;
            if m.vertices() > a.n {
                bail!("motif has {} vertices but the graph only {}", m.vertices(), a.n);
            }
            let n = a.n;
            let scale = subgraph_scale(n, &m);
            let w = WitnessedFunction {
                g: |x: &[usize]| {
                    let g = EdgeGraph::from_indicators(n, x).expect("state of the edge space");
                    subgraph_witness(&g, &m).expect("motif fits").iter().sum::<f64>() / m.edge_count() as f64
                },
                alpha: |x: &[usize]| {
                    subgraph_witness(&EdgeGraph::from_indicators(n, x).expect("state of the edge space"), &m)
                        .expect("motif fits")
                },
                a: m.edge_count() as f64,
                b: 0.0,
                variant: Variant::Star,
            };
            eprintln!("scale C(n-2, n_S-2) = {scale}");
            verify_star(&w, &ProductSpace::binary(edge_slots(n)))?
        }
        Witnessed::DtSquared => {
            if a.point.is_empty() {
                bail!("dt-squared needs at least one --point");
            }
            let r = dt_squared_lipschitz_check(&ProductSpace::binary(a.n), &a.point)?;
            eprintln!("max one-coordinate increment of d_T² = {}", r.max_increment);
            if !r.increment_ok {
                eprintln!("increment exceeds one");
            }
            let mut w = r.witness;
            w.holds &= r.increment_ok;
            w
        }
    };
    writeln!(sink(&a.out)?, "{}", report.to_json()?)?;
    Ok(status(a.strict, !report.holds))
}

fn parse_point(s: &str) -> std::result::Result<Vec<usize>, String> {
    s.split(',').map(|v| v.trim().parse::<usize>().map_err(|e| format!("`{v}`: {e}"))).collect()
}

/// Parses `key=value`, reading the value as JSON and falling back to a string.
fn parse_set(s: &str) -> Result<(String, Value)> {
    let (k, v) = s.split_once('=').with_context(|| format!("override `{s}` is not of the form key=value"))?;
    let value = serde_json::from_str(v).unwrap_or_else(|_| Value::String(v.to_string()));
    Ok((k.trim().to_string(), value))
}

fn kind_tag(kind: &str) -> Result<&'static str> {
    Ok(match kind.to_ascii_lowercase().as_str() {
        "cw" => "CW",
        "ergm" => "ERGM",
        "tsp" => "TSP",
        "steiner" => "STEINER",
        "swr" => "SWR",
        "convex" => "CONVEX",
        "coupling" => "COUPLING",
        other => bail!("unknown experiment kind `{other}`"),
    })
}

fn simulate_config(a: &SimulateArgs) -> Result<ExperimentConfig> {
    let tag = kind_tag(&a.kind)?;
    let mut obj: Map<String, Value> = match &a.config {
        Some(p) => match serde_json::from_reader(open(p)?).with_context(|| format!("parsing {}", p.display()))? {
            Value::Object(m) => m,
            _ => bail!("{} does not hold a JSON object", p.display()),
        },
        None => Map::new(),
    };
    if let Some(Value::String(k)) = obj.get("kind") {
        if k != tag {
            bail!("config is for kind {k}, command line asks for {tag}");
        }
    }
    obj.insert("kind".into(), json!(tag));
    for s in &a.sets {
        let (k, v) = parse_set(s)?;
        obj.insert(k, v);
    }
    let mut put = |k: &str, v: Option<Value>| {
        if let Some(v) = v {
            obj.insert(k.to_string(), v);
        }
    };
    put("seed", a.seed.map(|v| json!(v)));
    put("replicas", a.replicas.map(|v| json!(v)));
    put("thresholds", a.thresholds.as_ref().map(|v| json!(v)));
    put("burn_in", a.burn_in.map(|v| json!(v)));
    put("thinning", a.thinning.map(|v| json!(v)));
    put("chains", a.chains.map(|v| json!(v)));
    put("confidence", a.confidence.map(|v| json!(v)));
    let cfg: ExperimentConfig = serde_json::from_value(Value::Object(obj)).context("building the experiment configuration")?;
    cfg.validate()?;
    Ok(cfg)
}

fn simulate(a: &SimulateArgs) -> Result<Status> {
    let cfg = simulate_config(a)?;
    let report = run_experiment(&cfg)?;
    report.write_csv(sink(&a.out)?)?;
    if let Some(p) = &a.plot {
        report.write_plot_data(File::create(p).with_context(|| format!("creating {}", p.display()))?)?;
    }
    if let Some(p) = &a.json {
        std::fs::write(p, report.to_json()?).with_context(|| format!("writing {}", p.display()))?;
    }
    eprint!("{}", report.summary());
    Ok(status(a.strict, report.hypothesis_violated))
}

fn convex_solve(a: &ConvexArgs) -> Result<Status> {
    let mut inst = match &a.instance {
        Some(p) => ConvexDistanceInstance::read_json(open(p)?)?,
        None => ConvexDistanceInstance { x: Vec::new(), set: Vec::new() },
    };
    if let Some(x) = &a.x {
        inst.x = x.clone();
    }
    if !a.point.is_empty() {
        inst.set = a.point.clone();
    }
    inst.validate()?;
    let r = convex_distance(&inst)?;
    r.write_csv(sink(&a.out)?)?;
    if let Some(p) = &a.json {
        std::fs::write(p, serde_json::to_string_pretty(&r)?).with_context(|| format!("writing {}", p.display()))?;
    }
    eprintln!("d_T = {} ({:?}, {} iterations, gap {:e})", r.value, r.solver, r.iterations, r.duality_gap);
    Ok(Status::Ok)
}

fn coupling_run(a: &CouplingArgs) -> Result<Status> {
    if a.runs == 0 {
        bail!("--runs must be at least 1");
    }
    let model = CurieWeiss::new(a.n, a.beta, a.h)?;
    let matrix = curie_weiss_certified_matrix(&model)?;
    let stats = coupling_statistics(&model, &matrix, &a.steps, a.runs, a.seed)?;
    let mut w = sink(&a.out)?;
    writeln!(w, "k,mean,std_err,envelope,open_fraction")?;
    for (&k, (mean, se, open)) in a.steps.iter().zip(stats) {
        let env = if matrix.norm_1 < 1.0 { contraction_envelope(a.n, matrix.norm_1, k).to_string() } else { String::new() };
        writeln!(w, "{k},{mean},{se},{env},{open}")?;
    }
    eprintln!("‖A‖₁ = {}", matrix.norm_1);
    Ok(status(a.strict, matrix.norm_1 >= 1.0))
}

fn report_render(a: &RenderArgs) -> Result<Status> {
    let report = ExperimentReport::read_json(open(&a.input)?)?;
    let mut w = sink(&a.out)?;
    match a.format {
        RenderFormat::Summary => write!(w, "{}", report.summary())?,
        RenderFormat::Csv => report.write_csv(w)?,
        RenderFormat::Plot => report.write_plot_data(w)?,
        RenderFormat::Json => writeln!(w, "{}", report.to_json()?)?,
    }
    Ok(status(a.strict, report.hypothesis_violated))
}

fn run(cli: Cli) -> Result<Status> {
    if let Some(t) = cli.threads {
        if t == 0 {
            bail!("--threads must be at least 1");
        }
        rayon::ThreadPoolBuilder::new().num_threads(t).build_global().context("configuring the thread pool")?;
    }
    match &cli.command {
        Command::Bounds { action: BoundsAction::Eval(a) } => bounds_eval(a),
        Command::Bounds { action: BoundsAction::Constants } => bounds_constants(),
        Command::Dobrushin { action: DobrushinAction::Compute(a) } => dobrushin_compute(a),
        Command::Selfbound { action: SelfboundAction::Verify(a) } => selfbound_verify(a),
        Command::Simulate(a) => simulate(a),
        Command::Convexdist { action: ConvexAction::Solve(a) } => convex_solve(a),
        Command::Coupling { action: CouplingAction::Run(a) } => coupling_run(a),
        Command::Report { action: ReportAction::Render(a) } => report_render(a),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli) {
        Ok(Status::Ok) => ExitCode::SUCCESS,
        Ok(Status::Violated) => {
            eprintln!("hypothesis violated (--strict)");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
