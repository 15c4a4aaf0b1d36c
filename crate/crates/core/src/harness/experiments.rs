//! Running an experiment: draw replicas, estimate the centre on a pilot
//! half, measure deviation frequencies on the other half, and attach the
//! matching bounds.

use rand::Rng;
use rayon::prelude::*;
use std::collections::BTreeMap;
use std::time::Instant;

use super::config::{ConvexModel, ConvexSet, CwSampler, ExperimentConfig, ModelConfig, TourSolver};
use super::report::{normal_quantile, wilson_interval, ExperimentReport, ReportRow};
use crate::bounds::{convex_distance_rate, nonuniform_tail, ApplicationBound, MST_WITNESS_BOUND, SWR_CONVEX_RATE};
use crate::convexdist::{convex_distance, ConvexDistanceInstance};
use crate::dobrushin::{curie_weiss_matrix, exact_matrix, inhomogeneity_exact, weighted_swr_rho_bound, SubsetLaw};
use crate::dobrushin::{InterdependenceMatrix, MAX_UNIVERSE};
use crate::error::{domain, Error, Result};
use crate::finite_dist::FiniteDistribution;
use crate::geometry::{exact_tsp, heuristic_tsp, steiner_upper, EXACT_TSP_LIMIT};
use crate::models::coupling::{contraction_envelope, CoupledGlauber};
use crate::models::curie_weiss::{cw_exact_magnetization_law, CurieWeiss, CwChain, SpinConfiguration};
use crate::models::ergm::{EdgeTriangleErgm, ErgmChain};
use crate::models::graph::{edge_slots, subgraph_count, EdgeGraph};
use crate::models::swr::{uniform_swr_sample, weighted_swr_sample};
use crate::rng::{derive_seed, stream_rng, LabRng};

/// Slack when comparing a deviation with a threshold.
const EVENT_SLACK: f64 = 1e-12;

/// Largest finite set a convex distance experiment enumerates.
const CONVEX_SET_LIMIT: usize = 10_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Side {
    Upper,
    Lower,
    Both,
}

struct Curve {
    name: String,
    side: Side,
    /// `None` when the hypotheses fail.
    bound: Option<Box<dyn Fn(f64) -> Result<f64> + Sync>>,
}

impl Curve {
    fn new(name: &str, side: Side, bound: impl Fn(f64) -> Result<f64> + Sync + 'static) -> Self {
        Self { name: name.to_string(), side, bound: Some(Box::new(bound)) }
    }

    fn application(which: ApplicationBound, side: Side, ctx: &mut Context) -> Self {
        match which.validate() {
            Ok(()) => Self::new(which.name(), side, move |t| which.eval(t)),
            Err(e) => {
                ctx.violate(format!("{}: {e}", which.name()));
                Self { name: which.name().to_string(), side, bound: None }
            }
        }
    }
}

#[derive(Default)]
struct Context {
    warnings: Vec<String>,
    violated: bool,
    extras: BTreeMap<String, f64>,
}

impl Context {
    fn violate(&mut self, msg: String) {
        self.violated = true;
        self.warnings.push(format!("hypothesis violated: {msg}"));
    }
}

/// How the deviations are centred.
enum Centre {
    PilotMean,
    PilotMedian,
    Exact(f64),
    /// Raw values; every draw is measured.
    Origin,
}

fn median(values: &[f64]) -> f64 {
    if values.is_empty() {
        return f64::NAN;
    }
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let m = v.len() / 2;
    if v.len() % 2 == 1 {
        v[m]
    } else {
        0.5 * (v[m - 1] + v[m])
    }
}

fn mean(values: &[f64]) -> f64 {
    if values.is_empty() {
        return f64::NAN;
    }
    values.iter().sum::<f64>() / values.len() as f64
}

/// Draws `replicas` values, replica `r` from stream `r` of the seed.
fn independent_draws<F>(cfg: &ExperimentConfig, draw: F) -> Result<Vec<f64>>
where
    F: Fn(&mut LabRng) -> Result<f64> + Sync,
{
    (0..cfg.replicas)
        .into_par_iter()
        .map(|r| draw(&mut stream_rng(cfg.seed, r as u64)))
        .collect()
}

/// Runs `cfg.chains` Markov chains and interleaves their draws, so both
/// halves of the split see every chain.
fn chain_draws<S, F>(cfg: &ExperimentConfig, label: &str, start: S, default_thinning: usize) -> Result<Vec<f64>>
where
    S: Fn(&mut LabRng) -> Result<F> + Sync,
    F: FnMut(usize, &mut LabRng) -> f64,
{
    let chains = cfg.chains.min(cfg.replicas);
    let per_chain = cfg.replicas.div_ceil(chains);
    let thinning = if cfg.thinning == 0 { default_thinning } else { cfg.thinning };
    let seed = derive_seed(cfg.seed, label);
    let runs: Vec<Vec<f64>> = (0..chains)
        .into_par_iter()
        .map(|c| {
            let mut rng = stream_rng(seed, c as u64);
            let mut advance = start(&mut rng)?;
            advance(cfg.burn_in, &mut rng);
            let mut out = Vec::with_capacity(per_chain);
            for k in 0..per_chain {
                out.push(if k == 0 { advance(0, &mut rng) } else { advance(thinning, &mut rng) });
            }
            Ok(out)
        })
        .collect::<Result<_>>()?;
    let mut draws = Vec::with_capacity(cfg.replicas);
    'outer: for k in 0..per_chain {
        for run in &runs {
            if draws.len() == cfg.replicas {
                break 'outer;
            }
            draws.push(run[k]);
        }
    }
    Ok(draws)
}

fn assemble(
    cfg: &ExperimentConfig,
    draws: &[f64],
    centre: Centre,
    curves: &[Curve],
    ctx: Context,
    started: Instant,
) -> Result<ExperimentReport> {
    let split = match centre {
        Centre::PilotMean | Centre::PilotMedian if draws.len() >= 2 => draws.len() / 2,
        _ => 0,
    };
    let (pilot, measured) = draws.split_at(split);
    let stats_src = if pilot.is_empty() { measured } else { pilot };
    let (pilot_mean, pilot_median) = (mean(stats_src), median(stats_src));
    let mut ctx = ctx;
    let (centre_value, kind, source) = match centre {
        Centre::PilotMean => (pilot_mean, "mean", "pilot"),
        Centre::PilotMedian => (pilot_median, "median", "pilot"),
        Centre::Exact(c) => (c, "mean", "exact"),
        Centre::Origin => (0.0, "none", "none"),
    };
    if split == 0 && matches!(centre, Centre::PilotMean | Centre::PilotMedian) {
        ctx.warnings.push("too few replicas to split; the centre reuses the measured draws".into());
    }
    let mut rows = Vec::new();
    for curve in curves {
        for &t in &cfg.thresholds {
            let up = measured.iter().filter(|&&g| g - centre_value >= t - EVENT_SLACK).count() as u64;
            let low = measured.iter().filter(|&&g| centre_value - g >= t - EVENT_SLACK).count() as u64;
            let both = measured.iter().filter(|&&g| (g - centre_value).abs() >= t - EVENT_SLACK).count() as u64;
            let tested = match curve.side {
                Side::Upper => up,
                Side::Lower => low,
                Side::Both => both,
            };
            let m = measured.len() as u64;
            let freq = |c: u64| if m == 0 { 0.0 } else { c as f64 / m as f64 };
            let (ci_low, ci_high) = if m < 2 { (0.0, 1.0) } else { wilson_interval(tested, m, cfg.confidence)? };
            let bound = match &curve.bound {
                Some(f) => Some(f(t)?.min(1.0)),
                None => None,
            };
            rows.push(ReportRow {
                curve: curve.name.clone(),
                t,
                upper_freq: freq(up),
                lower_freq: freq(low),
                tested_freq: freq(tested),
                ci_low,
                ci_high,
                bound,
                satisfied: bound.is_some_and(|b| ci_low <= b),
            });
        }
    }
    Ok(ExperimentReport {
        kind: cfg.model.kind().to_string(),
        seed: cfg.seed,
        replicas: cfg.replicas,
        pilot_replicas: pilot.len(),
        measured_replicas: measured.len(),
        confidence: cfg.confidence,
        centre_kind: kind.to_string(),
        centre_source: source.to_string(),
        centre: centre_value,
        pilot_mean,
        pilot_median,
        hypothesis_violated: ctx.violated,
        warnings: ctx.warnings,
        extras: ctx.extras,
        rows,
        runtime_secs: started.elapsed().as_secs_f64(),
    })
}

/// Runs one experiment. Deterministic given the configuration, whatever
/// the size of the thread pool it runs in.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentReport> {
    cfg.validate()?;
    let started = Instant::now();
    match &cfg.model {
        ModelConfig::Cw { n, beta, h, sampler } => run_cw(cfg, *n, *beta, *h, *sampler, started),
        ModelConfig::Ergm { n, beta1, beta2, motif } => run_ergm(cfg, *n, *beta1, *beta2, motif, started),
        ModelConfig::Tsp { .. } | ModelConfig::Steiner { .. } => run_geometric(cfg, started),
        ModelConfig::Swr { universe, n, values, weights } => {
            run_swr(cfg, *universe, *n, values.as_deref(), weights.as_deref(), started)
        }
        ModelConfig::Convex { model, set, rate } => run_convex(cfg, model, set, *rate, started),
        ModelConfig::Coupling { n, beta, h } => run_coupling(cfg, *n, *beta, *h, started),
    }
}

fn run_cw(cfg: &ExperimentConfig, n: usize, beta: f64, h: f64, sampler: CwSampler, started: Instant) -> Result<ExperimentReport> {
    let model = CurieWeiss::new(n, beta, h)?;
    let mut ctx = Context::default();
    let law = cw_exact_magnetization_law(n, beta, h).ok();
    let draws = match sampler {
        CwSampler::Exact => {
            let Some(law) = &law else {
                return domain(format!("exact magnetization law unavailable for n = {n}; use the glauber sampler"));
            };
            independent_draws(cfg, |rng| Ok(law.sample(rng)))?
        }
        CwSampler::Glauber => chain_draws(
            cfg,
            "cw-chain",
            |rng| {
                let spins = (0..n).map(|_| if rng.random::<bool>() { 1 } else { -1 }).collect();
                let mut chain = CwChain::new(&model, SpinConfiguration::new(spins)?)?;
                Ok(move |steps: usize, rng: &mut LabRng| {
                    chain.run(steps, rng);
                    chain.magnetization()
                })
            },
            n,
        )?,
    };
    let up = ApplicationBound::CwUp { beta, h, n };
    let low = ApplicationBound::CwLow { beta, h, n };
    let curves = [Curve::application(up, Side::Upper, &mut ctx), Curve::application(low, Side::Lower, &mut ctx)];
    let centre = match &law {
        Some(law) => {
            // exact tails against the same curves
            let mut worst = f64::NEG_INFINITY;
            if up.validate().is_ok() {
                for &t in &cfg.thresholds {
                    worst = worst.max(law.upper_tail(t) - up.eval(t)?);
                    worst = worst.max(law.lower_tail(t) - low.eval(t)?);
                }
                ctx.extras.insert("exact_max_excess".into(), worst);
            }
            ctx.extras.insert("exact_mean".into(), law.mean());
            Centre::Exact(law.mean())
        }
        None => Centre::PilotMean,
    };
    ctx.extras.insert("norm1_bound".into(), beta * (1.0 - 1.0 / n as f64));
    assemble(cfg, &draws, centre, &curves, ctx, started)
}

fn run_ergm(
    cfg: &ExperimentConfig,
    n: usize,
    beta1: f64,
    beta2: f64,
    motif: &super::config::MotifSpec,
    started: Instant,
) -> Result<ExperimentReport> {
    let model = EdgeTriangleErgm::new(n, beta1, beta2)?;
    let motif = motif.build()?;
    if motif.vertices() > n {
        return domain(format!("motif with {} vertices exceeds the host graph on {n}", motif.vertices()));
    }
    let mut ctx = Context::default();
    let norm1 = match exact_matrix(&model) {
        Ok(a) => {
            ctx.extras.insert("norm1".into(), a.norm_1);
            ctx.extras.insert("norm_inf".into(), a.norm_inf);
            Some(a.norm_1)
        }
        Err(Error::Capacity { .. }) => {
            ctx.violate("interdependence matrix too large to certify ‖A‖₁ < 1".into());
            None
        }
        Err(e) => return Err(e),
    };
    let draws = chain_draws(
        cfg,
        "ergm-chain",
        |_| {
            let mut chain = ErgmChain::new(&model, EdgeGraph::empty(n))?;
            let motif = motif.clone();
            Ok(move |steps: usize, rng: &mut LabRng| {
                chain.run(steps, rng);
                subgraph_count(chain.graph(), &motif).expect("motif fits the host graph") as f64
            })
        },
        edge_slots(n),
    )?;
    let split = if draws.len() >= 2 { draws.len() / 2 } else { 0 };
    let mean_count = mean(if split == 0 { &draws[..] } else { &draws[..split] });
    let curves = match norm1 {
        Some(norm1) => {
            let (motif_vertices, motif_edges) = (motif.vertices(), motif.edge_count());
            let up = ApplicationBound::SubgraphUp { norm1, n, motif_vertices, motif_edges, mean_count };
            let low = ApplicationBound::SubgraphLow { norm1, n, motif_vertices, motif_edges, mean_count };
            vec![Curve::application(up, Side::Upper, &mut ctx), Curve::application(low, Side::Lower, &mut ctx)]
        }
        None => vec![
            Curve { name: "SUBGRAPH_UP".into(), side: Side::Upper, bound: None },
            Curve { name: "SUBGRAPH_LOW".into(), side: Side::Lower, bound: None },
        ],
    };
    assemble(cfg, &draws, Centre::PilotMean, &curves, ctx, started)
}

fn run_geometric(cfg: &ExperimentConfig, started: Instant) -> Result<ExperimentReport> {
    let (points, n) = match &cfg.model {
        ModelConfig::Tsp { points, n, .. } | ModelConfig::Steiner { points, n } => (points, *n),
        _ => unreachable!("only geometric kinds reach here"),
    };
    let universe = points.build(cfg.seed)?;
    let big_n = universe.len();
    if n < 2 || n > big_n {
        return domain(format!("sample size must lie in [2, {big_n}], got {n}"));
    }
    let mut ctx = Context::default();
    let rho = n as f64 / (big_n - n + 1) as f64;
    ctx.extras.insert("rho".into(), rho);
    match &cfg.model {
        ModelConfig::Tsp { cost, solver, .. } => {
            let l = cost.build()?;
            let exact = match solver {
                TourSolver::Exact => true,
                TourSolver::Heuristic => false,
                TourSolver::Auto => n <= EXACT_TSP_LIMIT,
            };
            if !exact {
                ctx.warnings.push("tour lengths come from local search, a surrogate for the optimal tour".into());
            }
            let draws = independent_draws(cfg, |rng| {
                let sample = universe.select(&uniform_swr_sample(big_n, n, rng)?.indices);
                Ok(if exact { exact_tsp(&sample, l.as_ref())? } else { heuristic_tsp(&sample, l.as_ref())? }.cost)
            })?;
            let c = l.ratio();
            ctx.extras.insert("cost_ratio".into(), c);
            let curves = [
                Curve::application(ApplicationBound::Tsp { rho, cost_ratio: c }, Side::Both, &mut ctx),
                Curve::application(ApplicationBound::SwrTsp { cost_ratio: c }, Side::Both, &mut ctx),
            ];
            assemble(cfg, &draws, Centre::PilotMedian, &curves, ctx, started)
        }
        _ => {
            universe.check_distinct()?;
            ctx.warnings.push("spanning tree length stands in for the Steiner tree length".into());
            let draws = independent_draws(cfg, |rng| {
                steiner_upper(&universe.select(&uniform_swr_sample(big_n, n, rng)?.indices))
            })?;
            let curves = [
                Curve::application(ApplicationBound::Steiner { rho }, Side::Both, &mut ctx),
                Curve::application(ApplicationBound::SwrConvex { c_budget: MST_WITNESS_BOUND }, Side::Both, &mut ctx),
            ];
            assemble(cfg, &draws, Centre::PilotMedian, &curves, ctx, started)
        }
    }
}

fn run_swr(
    cfg: &ExperimentConfig,
    universe: usize,
    n: usize,
    values: Option<&[f64]>,
    weights: Option<&[f64]>,
    started: Instant,
) -> Result<ExperimentReport> {
    if universe < 2 || n == 0 || n >= universe {
        return domain(format!("need 0 < n < N and N ≥ 2, got n = {n}, N = {universe}"));
    }
    let values: Vec<f64> = match values {
        Some(v) if v.len() != universe => return Err(Error::Dimension(v.len(), universe)),
        Some(v) => v.to_vec(),
        None => (0..universe).map(|j| j as f64 / (universe - 1) as f64).collect(),
    };
    if values.iter().any(|v| !(0.0..=1.0).contains(v)) {
        return domain("item values must lie in [0, 1]");
    }
    let mut ctx = Context::default();
    // the sum changes by at most one per coordinate, so Σαᵢ² ≤ n
    let budget = n as f64;
    let total = |idx: &[usize]| idx.iter().map(|&j| values[j]).sum::<f64>();
    match weights {
        None => {
            let draws = independent_draws(cfg, |rng| Ok(total(&uniform_swr_sample(universe, n, rng)?.indices)))?;
            let curves = [Curve::application(ApplicationBound::SwrConvex { c_budget: budget }, Side::Both, &mut ctx)];
            assemble(cfg, &draws, Centre::PilotMedian, &curves, ctx, started)
        }
        Some(w) => {
            if w.len() != universe {
                return Err(Error::Dimension(w.len(), universe));
            }
            let p = FiniteDistribution::from_weights(w)?;
            let rho = if universe <= MAX_UNIVERSE {
                inhomogeneity_exact(&SubsetLaw::weighted_sampling(&p, n)?)?.rho
            } else {
                let pmax = p.probs().iter().copied().fold(0.0, f64::max);
                let pmin = p.probs().iter().copied().fold(1.0, f64::min);
                weighted_swr_rho_bound(pmax, pmin, n, universe)?
            };
            ctx.extras.insert("rho".into(), rho);
            let curve = if rho < 1.0 {
                Curve::new("SWR_NONUNIFORM", Side::Both, move |t| nonuniform_tail(t, budget, rho))
            } else {
                ctx.violate(format!("SWR_NONUNIFORM: inhomogeneity ρ = {rho} is not below 1"));
                Curve { name: "SWR_NONUNIFORM".into(), side: Side::Both, bound: None }
            };
            let draws = independent_draws(cfg, |rng| Ok(total(&weighted_swr_sample(&p, n, rng)?.indices)))?;
            assemble(cfg, &draws, Centre::PilotMedian, &[curve], ctx, started)
        }
    }
}

fn binomial_exact(n: usize, k: usize) -> u128 {
    (0..k).fold(1u128, |acc, i| acc * (n - i) as u128 / (i + 1) as u128)
}

/// Points of `{0,1}^n` with at most `radius` ones.
fn hamming_ball(n: usize, radius: usize) -> Result<Vec<Vec<usize>>> {
    let size: u128 = (0..=radius.min(n)).map(|k| binomial_exact(n, k)).sum();
    if size > CONVEX_SET_LIMIT as u128 {
        return Err(Error::Capacity { what: "Hamming ball", needed: size, limit: CONVEX_SET_LIMIT as u128 });
    }
    let mut out = Vec::new();
    let mut current = Vec::new();
    fn rec(n: usize, radius: usize, current: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if current.len() == n {
            out.push(current.clone());
            return;
        }
        let ones = current.iter().sum::<usize>();
        current.push(0);
        rec(n, radius, current, out);
        current.pop();
        if ones < radius {
            current.push(1);
            rec(n, radius, current, out);
            current.pop();
        }
    }
    rec(n, radius, &mut current, &mut out);
    Ok(out)
}

/// Ordered samples of `n` distinct items from `0..universe` containing `element`.
fn samples_containing(universe: usize, n: usize, element: usize) -> Result<Vec<Vec<usize>>> {
    let size = (0..n - 1).fold(n as u128, |acc, i| acc * (universe - 1 - i) as u128);
    if size > CONVEX_SET_LIMIT as u128 {
        return Err(Error::Capacity { what: "set of ordered samples", needed: size, limit: CONVEX_SET_LIMIT as u128 });
    }
    let mut out = Vec::new();
    fn rec(universe: usize, n: usize, element: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == n {
            if cur.contains(&element) {
                out.push(cur.clone());
            }
            return;
        }
        for j in 0..universe {
            if !cur.contains(&j) {
                cur.push(j);
                rec(universe, n, element, cur, out);
                cur.pop();
            }
        }
    }
    rec(universe, n, element, &mut Vec::new(), &mut out);
    Ok(out)
}

fn run_convex(
    cfg: &ExperimentConfig,
    model: &ConvexModel,
    set: &ConvexSet,
    rate: Option<f64>,
    started: Instant,
) -> Result<ExperimentReport> {
    let mut ctx = Context::default();
    let (points, mu_s, default_rate): (Vec<Vec<usize>>, f64, f64) = match (model, set) {
        (ConvexModel::IndependentBits { n, p }, set) => {
            if !(*p > 0.0 && *p < 1.0) {
                return domain(format!("bit probability must lie in (0, 1), got {p}"));
            }
            let mut pts = match set {
                ConvexSet::HammingBall { radius } => hamming_ball(*n, *radius)?,
                ConvexSet::Explicit { points } => points.clone(),
                ConvexSet::ContainsElement { .. } => return domain("contains_element sets apply to sampling laws"),
            };
            if pts.iter().any(|y| y.len() != *n || y.iter().any(|&s| s > 1)) {
                return domain("set points must be bit vectors of the model's length");
            }
            pts.sort();
            pts.dedup();
            let mu: f64 = pts
                .iter()
                .map(|y| y.iter().map(|&s| if s == 1 { *p } else { 1.0 - p }).product::<f64>())
                .sum();
            (pts, mu, convex_distance_rate(0.0)?)
        }
        (ConvexModel::UniformSwr { universe, n }, set) => {
            if *n == 0 || n > universe {
                return domain(format!("need 0 < n ≤ N, got n = {n}, N = {universe}"));
            }
            let ordered = (0..*n).fold(1.0, |acc, i| acc * (universe - i) as f64);
            let (pts, mu) = match set {
                ConvexSet::ContainsElement { element } => {
                    if element >= universe {
                        return domain(format!("element {element} outside 0..{universe}"));
                    }
                    (samples_containing(*universe, *n, *element)?, *n as f64 / *universe as f64)
                }
                ConvexSet::Explicit { points } => {
                    let mut pts = points.clone();
                    for y in &pts {
                        let mut s = y.clone();
                        s.sort_unstable();
                        s.dedup();
                        if y.len() != *n || s.len() != *n || s.iter().any(|&j| j >= *universe) {
                            return domain("set points must be ordered samples of distinct items");
                        }
                    }
                    pts.sort();
                    pts.dedup();
                    let mu = pts.len() as f64 / ordered;
                    (pts, mu)
                }
                ConvexSet::HammingBall { .. } => return domain("Hamming balls apply to bit vectors"),
            };
            (pts, mu, SWR_CONVEX_RATE)
        }
    };
    if points.is_empty() || mu_s <= 0.0 {
        return Err(Error::Degenerate("the set has zero probability".into()));
    }
    let rate = rate.unwrap_or(default_rate);
    if !(rate > 0.0 && rate.is_finite()) {
        return domain(format!("rate must be positive, got {rate}"));
    }
    let sample = |rng: &mut LabRng| -> Result<Vec<usize>> {
        Ok(match model {
            ConvexModel::IndependentBits { n, p } => (0..*n).map(|_| (rng.random::<f64>() < *p) as usize).collect(),
            ConvexModel::UniformSwr { universe, n } => uniform_swr_sample(*universe, *n, rng)?.indices,
        })
    };
    let draws = independent_draws(cfg, |rng| {
        let x = sample(rng)?;
        Ok(convex_distance(&ConvexDistanceInstance { x, set: points.clone() })?.value)
    })?;
    let mgf: Vec<f64> = draws.iter().map(|d| (rate * d * d).exp()).collect();
    let m = mean(&mgf);
    let se = if mgf.len() > 1 {
        (mgf.iter().map(|v| (v - m).powi(2)).sum::<f64>() / (mgf.len() - 1) as f64 / mgf.len() as f64).sqrt()
    } else {
        f64::INFINITY
    };
    let z = normal_quantile(cfg.confidence);
    ctx.extras.insert("mu_s".into(), mu_s);
    ctx.extras.insert("inverse_mu_s".into(), 1.0 / mu_s);
    ctx.extras.insert("rate".into(), rate);
    ctx.extras.insert("mgf_mean".into(), m);
    ctx.extras.insert("mgf_ci_low".into(), m - z * se);
    ctx.extras.insert("mgf_ci_high".into(), m + z * se);
    if m - z * se > 1.0 / mu_s {
        ctx.warnings.push("E exp(rate d_T²) exceeds 1/μ(S) beyond the confidence interval".into());
    }
    let curves = [Curve::new("CONVEX", Side::Upper, move |t| Ok(((-rate * t * t).exp() / mu_s).min(1.0)))];
    assemble(cfg, &draws, Centre::Origin, &curves, ctx, started)
}

/// An interdependence matrix for Curie-Weiss: exact when enumerable,
/// the analytic `β/n` matrix otherwise.
pub fn curie_weiss_certified_matrix(model: &CurieWeiss) -> Result<InterdependenceMatrix> {
    match exact_matrix(model) {
        Err(Error::Capacity { .. }) => curie_weiss_matrix(model.n(), model.beta()),
        other => other,
    }
}

/// Mean disagreement counts `E ‖L(k)‖₁` of coupled Curie-Weiss chains
/// started from all `+1` and all `-1`, with their standard errors and
/// coalescence frequencies, at each requested `k`.
pub fn coupling_statistics(
    model: &CurieWeiss,
    matrix: &InterdependenceMatrix,
    steps: &[usize],
    runs: usize,
    seed: u64,
) -> Result<Vec<(f64, f64, f64)>> {
    let n = model.n();
    let horizon = steps.iter().copied().max().unwrap_or(0);
    let paths: Vec<Vec<usize>> = (0..runs)
        .into_par_iter()
        .map(|r| {
            let mut rng = stream_rng(seed, r as u64);
            let mut chain = CoupledGlauber::new(model, matrix, vec![1; n], vec![0; n])?;
            chain.run_disagreements(horizon, &mut rng)
        })
        .collect::<Result<_>>()?;
    Ok(steps
        .iter()
        .map(|&k| {
            let vals: Vec<f64> = paths.iter().map(|p| p[k] as f64).collect();
            let m = mean(&vals);
            let se = if runs > 1 {
                (vals.iter().map(|v| (v - m).powi(2)).sum::<f64>() / (runs - 1) as f64 / runs as f64).sqrt()
            } else {
                0.0
            };
            let open = vals.iter().filter(|&&v| v > 0.0).count() as f64 / runs as f64;
            (m, se, open)
        })
        .collect())
}

fn run_coupling(cfg: &ExperimentConfig, n: usize, beta: f64, h: f64, started: Instant) -> Result<ExperimentReport> {
    let model = CurieWeiss::new(n, beta, h)?;
    let matrix = curie_weiss_certified_matrix(&model)?;
    let mut ctx = Context::default();
    ctx.extras.insert("norm1".into(), matrix.norm_1);
    ctx.extras.insert("norm_inf".into(), matrix.norm_inf);
    if matrix.norm_1 >= 1.0 {
        ctx.violate(format!("COUPLING: ‖A‖₁ = {} is not below 1", matrix.norm_1));
    }
    let steps: Vec<usize> = cfg.thresholds.iter().map(|&t| t as usize).collect();
    let stats = coupling_statistics(&model, &matrix, &steps, cfg.replicas, cfg.seed)?;
    let z = normal_quantile(cfg.confidence);
    let nf = n as f64;
    let rows = steps
        .iter()
        .zip(&stats)
        .map(|(&k, &(m, se, open))| {
            let bound = contraction_envelope(n, matrix.norm_1, k) / nf;
            let ci_low = ((m - z * se) / nf).clamp(0.0, 1.0);
            ReportRow {
                curve: "COUPLING".into(),
                t: k as f64,
                upper_freq: m / nf,
                lower_freq: open,
                tested_freq: m / nf,
                ci_low,
                ci_high: ((m + z * se) / nf).clamp(0.0, 1.0),
                bound: Some(bound.min(1.0)),
                satisfied: ci_low <= bound,
            }
        })
        .collect();
    Ok(ExperimentReport {
        kind: cfg.model.kind().to_string(),
        seed: cfg.seed,
        replicas: cfg.replicas,
        pilot_replicas: 0,
        measured_replicas: cfg.replicas,
        confidence: cfg.confidence,
        centre_kind: "none".into(),
        centre_source: "none".into(),
        centre: 0.0,
        pilot_mean: f64::NAN,
        pilot_median: f64::NAN,
        hypothesis_violated: ctx.violated,
        warnings: ctx.warnings,
        extras: ctx.extras,
        rows,
        runtime_secs: started.elapsed().as_secs_f64(),
    })
}
