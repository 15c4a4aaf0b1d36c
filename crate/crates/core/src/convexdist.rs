//! Talagrand's convex distance to a finite set.
//!
//! With `v(y)ᵢ = 1[xᵢ ≠ yᵢ]`, the convex distance `d_T(x, S)` is the
//! Euclidean norm of the minimum-norm point of `conv{v(y) : y ∈ S}`, and the
//! optimal weight vector `c` is that point normalised. The solver is Wolfe's
//! minimum-norm-point algorithm with an away-step Frank-Wolfe fallback; an
//! exhaustive active-set oracle covers tiny instances.

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal};
use std::collections::HashMap;
use std::io::{Read, Write};

use crate::dobrushin::fmt_f64;
use crate::error::{domain, Error, Result};
use crate::rng::{stream_rng, LabRng};
use crate::selfbounding::{verify_star, Variant, VerificationReport, WitnessedFunction};
use crate::space::ProductSpace;

/// Relative duality gap at which the solver stops.
pub const GAP_TOL: f64 = 1e-10;
/// Iteration cap for either solver phase.
pub const MAX_ITERS: usize = 100_000;
/// Largest `|S|` the oracle enumerates.
pub const ORACLE_LIMIT: usize = 6;
/// Largest `|S|` and `n` the solver accepts.
pub const SOLVER_LIMIT: usize = 10_000;
/// Largest space [`dt_squared_lipschitz_check`] enumerates.
pub const LIPSCHITZ_SPACE_LIMIT: u128 = 10_000;

const WEIGHT_EPS: f64 = 1e-14;

/// A point `x` and a finite set `S` of points with the same number of coordinates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvexDistanceInstance {
    pub x: Vec<usize>,
    #[serde(rename = "S", alias = "s")]
    pub set: Vec<Vec<usize>>,
}

impl ConvexDistanceInstance {
    pub fn new(x: Vec<usize>, set: Vec<Vec<usize>>) -> Result<Self> {
        let inst = Self { x, set };
        inst.validate()?;
        Ok(inst)
    }

    pub fn validate(&self) -> Result<()> {
        if self.set.is_empty() {
            return domain("the set S is empty");
        }
        for y in &self.set {
            if y.len() != self.x.len() {
                return Err(Error::Dimension(y.len(), self.x.len()));
            }
        }
        Ok(())
    }

    pub fn n(&self) -> usize {
        self.x.len()
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let inst: Self = serde_json::from_str(s)?;
        inst.validate()?;
        Ok(inst)
    }

    pub fn read_json<R: Read>(r: R) -> Result<Self> {
        let inst: Self = serde_json::from_reader(r)?;
        inst.validate()?;
        Ok(inst)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Solver {
    /// `x ∈ S`; no iteration needed.
    Member,
    Wolfe,
    AwayFrankWolfe,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvexDistanceResult {
    pub value: f64,
    /// Convex weights over `S`, in input order.
    pub optimal_weights: Vec<f64>,
    /// Nonnegative unit vector attaining the supremum.
    pub optimal_direction: Vec<f64>,
    /// `‖m‖² - min_y ⟨m, v(y)⟩` at the returned point `m`.
    pub duality_gap: f64,
    pub iterations: usize,
    pub solver: Solver,
}

impl ConvexDistanceResult {
    /// Rows `component,index,value` for the distance, the gap, weights and direction.
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut wtr = csv::Writer::from_writer(w);
        wtr.write_record(["component", "index", "value"])?;
        wtr.write_record(["distance", "0", &fmt_f64(self.value)])?;
        wtr.write_record(["duality_gap", "0", &fmt_f64(self.duality_gap)])?;
        for (i, v) in self.optimal_weights.iter().enumerate() {
            wtr.write_record(["weight", &i.to_string(), &fmt_f64(*v)])?;
        }
        for (i, v) in self.optimal_direction.iter().enumerate() {
            wtr.write_record(["direction", &i.to_string(), &fmt_f64(*v)])?;
        }
        wtr.flush()?;
        Ok(())
    }
}

/// Distinct disagreement supports, and which one each member of `S` maps to.
struct Supports {
    points: Vec<Vec<u32>>,
    owner: Vec<usize>,
}

fn supports(inst: &ConvexDistanceInstance) -> Supports {
    let mut index: HashMap<Vec<u32>, usize> = HashMap::new();
    let mut points = Vec::new();
    let mut owner = Vec::with_capacity(inst.set.len());
    for y in &inst.set {
        let supp: Vec<u32> = (0..inst.n()).filter(|&i| inst.x[i] != y[i]).map(|i| i as u32).collect();
        let k = *index.entry(supp.clone()).or_insert_with(|| {
            points.push(supp);
            points.len() - 1
        });
        owner.push(k);
    }
    Supports { points, owner }
}

fn dot_dense(m: &[f64], p: &[u32]) -> f64 {
    p.iter().map(|&i| m[i as usize]).sum()
}

fn overlap(p: &[u32], q: &[u32]) -> f64 {
    let (mut i, mut j, mut c) = (0, 0, 0usize);
    while i < p.len() && j < q.len() {
        match p[i].cmp(&q[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                c += 1;
                i += 1;
                j += 1;
            }
        }
    }
    c as f64
}

fn combine(points: &[Vec<u32>], active: &[usize], lam: &[f64], n: usize) -> Vec<f64> {
    let mut m = vec![0.0; n];
    for (&k, &l) in active.iter().zip(lam) {
        for &i in &points[k] {
            m[i as usize] += l;
        }
    }
    m
}

fn norm_sq(m: &[f64]) -> f64 {
    m.iter().map(|v| v * v).sum()
}

/// `‖m‖² - min_k ⟨m, p_k⟩` and the minimising `k`.
fn gap_and_vertex(points: &[Vec<u32>], m: &[f64]) -> (f64, usize) {
    let (mut best, mut arg) = (f64::INFINITY, 0);
    for (k, p) in points.iter().enumerate() {
        let d = dot_dense(m, p);
        if d < best {
            best = d;
            arg = k;
        }
    }
    (norm_sq(m) - best, arg)
}

fn converged(gap: f64, m: &[f64]) -> bool {
    gap <= GAP_TOL * norm_sq(m).max(1.0)
}

/// Weights of the minimum-norm point of the affine hull of the active
/// points, from the bordered Gram system.
fn affine_minimizer(points: &[Vec<u32>], active: &[usize]) -> Option<Vec<f64>> {
    let k = active.len();
    let mut kkt = DMatrix::<f64>::zeros(k + 1, k + 1);
    for a in 0..k {
        for b in a..k {
            let g = overlap(&points[active[a]], &points[active[b]]);
            kkt[(a, b)] = g;
            kkt[(b, a)] = g;
        }
        kkt[(a, k)] = 1.0;
        kkt[(k, a)] = 1.0;
    }
    let mut rhs = DVector::<f64>::zeros(k + 1);
    rhs[k] = 1.0;
    let sol = kkt.lu().solve(&rhs)?;
    let mu: Vec<f64> = sol.iter().take(k).copied().collect();
    if mu.iter().all(|v| v.is_finite()) && (mu.iter().sum::<f64>() - 1.0).abs() < 1e-8 {
        Some(mu)
    } else {
        None
    }
}

struct Solution {
    active: Vec<usize>,
    lam: Vec<f64>,
    iterations: usize,
}

/// Wolfe's minimum-norm-point algorithm. `None` when the affine systems
/// become singular or the iteration cap is hit.
fn wolfe(points: &[Vec<u32>], n: usize) -> Option<Solution> {
    let start = (0..points.len()).min_by_key(|&k| points[k].len())?;
    let mut active = vec![start];
    let mut lam = vec![1.0];
    let mut iterations = 0;
    loop {
        iterations += 1;
        if iterations > MAX_ITERS {
            return None;
        }
        let m = combine(points, &active, &lam, n);
        let (gap, j) = gap_and_vertex(points, &m);
        if converged(gap, &m) || active.contains(&j) {
            return Some(Solution { active, lam, iterations });
        }
        active.push(j);
        lam.push(0.0);
        loop {
            iterations += 1;
            if iterations > MAX_ITERS {
                return None;
            }
            let mu = affine_minimizer(points, &active)?;
            if mu.iter().all(|&v| v > WEIGHT_EPS) {
                lam = mu;
                break;
            }
            // step from lam towards mu until the first weight hits zero
            let mut theta = 1.0_f64;
            for (l, u) in lam.iter().zip(&mu) {
                if *u <= WEIGHT_EPS && l - u > 0.0 {
                    theta = theta.min(l / (l - u));
                }
            }
            for (l, u) in lam.iter_mut().zip(&mu) {
                *l = theta * u + (1.0 - theta) * *l;
            }
            let mut smallest = 0;
            for a in 1..lam.len() {
                if lam[a] < lam[smallest] {
                    smallest = a;
                }
            }
            let keep: Vec<bool> = (0..lam.len()).map(|a| a != smallest && lam[a] > WEIGHT_EPS).collect();
            let mut a = 0;
            active.retain(|_| {
                a += 1;
                keep[a - 1]
            });
            let mut b = 0;
            lam.retain(|_| {
                b += 1;
                keep[b - 1]
            });
            let total: f64 = lam.iter().sum();
            if active.is_empty() || total <= 0.0 {
                return None;
            }
            lam.iter_mut().for_each(|l| *l /= total);
        }
    }
}

/// Away-step Frank-Wolfe with exact line search over all distinct points.
fn away_frank_wolfe(points: &[Vec<u32>], n: usize) -> Solution {
    let k = points.len();
    let start = (0..k).min_by_key(|&j| points[j].len()).expect("non-empty point set");
    let mut w = vec![0.0; k];
    w[start] = 1.0;
    let all: Vec<usize> = (0..k).collect();
    let mut m = combine(points, &all, &w, n);
    let mut iterations = 0;
    while iterations < MAX_ITERS {
        iterations += 1;
        let dots: Vec<f64> = points.iter().map(|p| dot_dense(&m, p)).collect();
        let mm = norm_sq(&m);
        let s = (0..k).min_by(|&a, &b| dots[a].total_cmp(&dots[b])).unwrap_or(0);
        if converged(mm - dots[s], &m) {
            break;
        }
        let v = (0..k).filter(|&j| w[j] > 0.0).max_by(|&a, &b| dots[a].total_cmp(&dots[b])).unwrap_or(s);
        let fw_gap = mm - dots[s];
        let away_gap = dots[v] - mm;
        // direction d = target - m (FW) or m - p_v (away)
        let (dir, gamma_max, toward) = if fw_gap >= away_gap {
            let mut d: Vec<f64> = m.iter().map(|x| -x).collect();
            points[s].iter().for_each(|&i| d[i as usize] += 1.0);
            (d, 1.0, true)
        } else {
            let mut d = m.clone();
            points[v].iter().for_each(|&i| d[i as usize] -= 1.0);
            (d, w[v] / (1.0 - w[v]).max(f64::MIN_POSITIVE), false)
        };
        let dd = norm_sq(&dir);
        if dd == 0.0 {
            break;
        }
        let md: f64 = m.iter().zip(&dir).map(|(a, b)| a * b).sum();
        let gamma = (-md / dd).clamp(0.0, gamma_max);
        if gamma == 0.0 {
            break;
        }
        for (x, d) in m.iter_mut().zip(&dir) {
            *x += gamma * d;
        }
        if toward {
            w.iter_mut().for_each(|x| *x *= 1.0 - gamma);
            w[s] += gamma;
        } else {
            w.iter_mut().for_each(|x| *x *= 1.0 + gamma);
            w[v] -= gamma;
            if w[v] < WEIGHT_EPS {
                w[v] = 0.0;
            }
        }
    }
    let active: Vec<usize> = (0..k).filter(|&j| w[j] > 0.0).collect();
    let lam: Vec<f64> = active.iter().map(|&j| w[j]).collect();
    let total: f64 = lam.iter().sum();
    Solution { active, lam: lam.into_iter().map(|l| l / total).collect(), iterations }
}

fn uniform_direction(n: usize) -> Vec<f64> {
    if n == 0 {
        return Vec::new();
    }
    vec![1.0 / (n as f64).sqrt(); n]
}

/// `d_T(x, S)` with optimal weights over `S` and the optimal direction.
pub fn convex_distance(inst: &ConvexDistanceInstance) -> Result<ConvexDistanceResult> {
    inst.validate()?;
    let n = inst.n();
    if inst.set.len() > SOLVER_LIMIT || n > SOLVER_LIMIT {
        return Err(Error::Capacity {
            what: "convex distance instance",
            needed: inst.set.len().max(n) as u128,
            limit: SOLVER_LIMIT as u128,
        });
    }
    let sp = supports(inst);
    if let Some(k) = sp.points.iter().position(|p| p.is_empty()) {
        let member = sp.owner.iter().position(|&o| o == k).expect("every support has an owner");
        let mut weights = vec![0.0; inst.set.len()];
        weights[member] = 1.0;
        return Ok(ConvexDistanceResult {
            value: 0.0,
            optimal_weights: weights,
            optimal_direction: uniform_direction(n),
            duality_gap: 0.0,
            iterations: 0,
            solver: Solver::Member,
        });
    }
    let (sol, solver) = match wolfe(&sp.points, n) {
        Some(s) => (s, Solver::Wolfe),
        None => (away_frank_wolfe(&sp.points, n), Solver::AwayFrankWolfe),
    };
    let m = combine(&sp.points, &sol.active, &sol.lam, n);
    let (gap, _) = gap_and_vertex(&sp.points, &m);
    let value = norm_sq(&m).sqrt();
    let mut distinct = vec![0.0; sp.points.len()];
    for (&k, &l) in sol.active.iter().zip(&sol.lam) {
        distinct[k] = l;
    }
    let mut weights = vec![0.0; inst.set.len()];
    let mut placed = vec![false; sp.points.len()];
    for (j, &k) in sp.owner.iter().enumerate() {
        if !placed[k] {
            weights[j] = distinct[k];
            placed[k] = true;
        }
    }
    let direction = if value > 0.0 { m.iter().map(|v| v.max(0.0) / value).collect() } else { uniform_direction(n) };
    Ok(ConvexDistanceResult {
        value,
        optimal_weights: weights,
        optimal_direction: direction,
        duality_gap: gap.max(0.0),
        iterations: sol.iterations,
        solver,
    })
}

/// Exhaustive oracle: for every non-empty subset of `S`, the least-norm
/// point of its affine hull (SVD least squares); the smallest norm among
/// those with nonnegative weights.
pub fn convex_distance_oracle(inst: &ConvexDistanceInstance) -> Result<f64> {
    inst.validate()?;
    let k = inst.set.len();
    if k > ORACLE_LIMIT {
        return Err(Error::Capacity { what: "convex distance oracle", needed: k as u128, limit: ORACLE_LIMIT as u128 });
    }
    let n = inst.n();
    let vecs: Vec<DVector<f64>> = inst
        .set
        .iter()
        .map(|y| DVector::from_iterator(n, (0..n).map(|i| if inst.x[i] != y[i] { 1.0 } else { 0.0 })))
        .collect();
    let mut best = f64::INFINITY;
    for mask in 1u32..(1 << k) {
        let members: Vec<usize> = (0..k).filter(|&j| mask & (1 << j) != 0).collect();
        let base = &vecs[members[0]];
        let candidate = if members.len() == 1 {
            Some((base.clone(), vec![1.0]))
        } else {
            // m = base + D t with D = [v_j - base], least squares D t = -base
            let d = DMatrix::from_columns(&members[1..].iter().map(|&j| &vecs[j] - base).collect::<Vec<_>>());
            let svd = d.clone().svd(true, true);
            svd.solve(&(-base), 1e-12).ok().map(|t| {
                let m = base + &d * &t;
                let mut mu = vec![1.0 - t.sum()];
                mu.extend(t.iter().copied());
                (m, mu)
            })
        };
        if let Some((m, mu)) = candidate {
            if mu.iter().all(|&v| v >= -1e-12) {
                best = best.min(m.norm());
            }
        }
    }
    Ok(best)
}

/// `d_c(x, S) = min_{y ∈ S} Σ cᵢ 1[xᵢ ≠ yᵢ]`.
pub fn weighted_distance(c: &[f64], x: &[usize], set: &[Vec<usize>]) -> f64 {
    set.iter()
        .map(|y| (0..x.len()).filter(|&i| x[i] != y[i]).map(|i| c[i]).sum::<f64>())
        .fold(f64::INFINITY, f64::min)
}

#[derive(Debug, Clone, Serialize)]
pub struct DtSquaredReport {
    pub states: usize,
    /// Largest `|d_T²(x) - d_T²(x')|` over one-coordinate changes.
    pub max_increment: f64,
    pub increment_ok: bool,
    /// Verification of the weak `(4, 0)` witness `αᵢ = 2 d_T(x) cᵢ(x)`.
    pub witness: VerificationReport,
}

impl DtSquaredReport {
    pub fn holds(&self) -> bool {
        self.increment_ok && self.witness.holds
    }
}

/// Exhaustive checks of `x ↦ d_T²(x, S)` on a finite space: one-coordinate
/// increments lie in `[-1, 1]`, and `αᵢ = 2 d_T(x) cᵢ(x)` witnesses the weak
/// `(4, 0)` property.
pub fn dt_squared_lipschitz_check(space: &ProductSpace, set: &[Vec<usize>]) -> Result<DtSquaredReport> {
    let len = space.require_len("convex distance enumeration", LIPSCHITZ_SPACE_LIMIT)?;
    if set.is_empty() {
        return domain("the set S is empty");
    }
    if let Some(y) = set.iter().find(|y| !space.contains(y)) {
        return domain(format!("set member {y:?} is not a state of the space"));
    }
    let table: Vec<ConvexDistanceResult> = (0..len)
        .into_par_iter()
        .map(|k| convex_distance(&ConvexDistanceInstance { x: space.decode(k), set: set.to_vec() }))
        .collect::<Result<_>>()?;
    let mut max_increment: f64 = 0.0;
    let mut y = vec![0; space.dim()];
    for (k, r) in table.iter().enumerate() {
        space.decode_into(k, &mut y);
        for i in 0..space.dim() {
            let orig = y[i];
            for s in 0..space.sizes()[i] {
                if s != orig {
                    y[i] = s;
                    let other = &table[space.encode(&y)];
                    max_increment = max_increment.max((r.value.powi(2) - other.value.powi(2)).abs());
                }
            }
            y[i] = orig;
        }
    }
    let w = WitnessedFunction {
        g: |x: &[usize]| table[space.encode(x)].value.powi(2),
        alpha: |x: &[usize]| {
            let r = &table[space.encode(x)];
            r.optimal_direction.iter().map(|c| 2.0 * r.value * c).collect()
        },
        a: 4.0,
        b: 0.0,
        variant: Variant::Wstar,
    };
    let witness = verify_star(&w, space)?;
    Ok(DtSquaredReport { states: len, max_increment, increment_ok: max_increment <= 1.0 + 1e-9, witness })
}

/// `E[exp(rate · d_T(X, S)²)]` against `1/μ(S)`.
#[derive(Debug, Clone, Serialize)]
pub struct ConvexExperimentReport {
    pub replicas: usize,
    pub rate: f64,
    pub mean: f64,
    pub std_err: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    /// `1/μ(S)`.
    pub rhs: f64,
    /// `ci_low ≤ rhs`.
    pub satisfied: bool,
}

/// Monte Carlo estimate of `E[exp(rate · d_T²)]` with a two-sided normal
/// interval at `confidence`. Replica `r` draws from stream `r` of `seed`.
pub fn convex_distance_experiment<F>(
    sample: F,
    set: &[Vec<usize>],
    mu_s: f64,
    rate: f64,
    replicas: usize,
    seed: u64,
    confidence: f64,
) -> Result<ConvexExperimentReport>
where
    F: Fn(&mut LabRng) -> Vec<usize> + Sync,
{
    if mu_s <= 0.0 {
        return Err(Error::Degenerate("μ(S) is zero, so 1/μ(S) is infinite".into()));
    }
    if replicas == 0 || !(0.0 < confidence && confidence < 1.0) {
        return domain("need at least one replica and a confidence level in (0, 1)");
    }
    let values: Vec<f64> = (0..replicas)
        .into_par_iter()
        .map(|r| {
            let mut rng = stream_rng(seed, r as u64);
            let x = sample(&mut rng);
            let d = convex_distance(&ConvexDistanceInstance { x, set: set.to_vec() })?.value;
            Ok((rate * d * d).exp())
        })
        .collect::<Result<_>>()?;
    let n = replicas as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = if replicas > 1 { values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0) } else { 0.0 };
    let std_err = (var / n).sqrt();
    let z = Normal::standard().inverse_cdf(0.5 + confidence / 2.0);
    let rhs = 1.0 / mu_s;
    let ci_low = mean - z * std_err;
    Ok(ConvexExperimentReport {
        replicas,
        rate,
        mean,
        std_err,
        ci_low,
        ci_high: mean + z * std_err,
        rhs,
        satisfied: ci_low <= rhs,
    })
}

/// Exact `(E[exp(rate · d_T(X, S)²)], μ(S))` for a law given as weighted points.
pub fn exact_convex_expectation(law: &[(Vec<usize>, f64)], set: &[Vec<usize>], rate: f64) -> Result<(f64, f64)> {
    let terms: Vec<(f64, f64)> = law
        .par_iter()
        .map(|(x, p)| {
            let d = convex_distance(&ConvexDistanceInstance { x: x.clone(), set: set.to_vec() })?.value;
            let inside = if d == 0.0 { *p } else { 0.0 };
            Ok((p * (rate * d * d).exp(), inside))
        })
        .collect::<Result<_>>()?;
    let total: f64 = law.iter().map(|(_, p)| p).sum();
    if (total - 1.0).abs() > 1e-9 {
        return Err(Error::InvalidDistribution(format!("law has total mass {total}")));
    }
    Ok(terms.iter().fold((0.0, 0.0), |acc, t| (acc.0 + t.0, acc.1 + t.1)))
}
