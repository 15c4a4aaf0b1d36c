//! Exact and heuristic travelling salesman tours, plus the per-point
//! Lipschitz witness built from a tour with small squared edge sum.

use serde::Serialize;

use super::hilbert::space_filling_order;
use super::{cost_matrix, euclid_sq, CostFunction, Euclidean, PointSet, Tour};
use crate::bounds::{TOUR_SQUARE_SUM, TSP_WITNESS_FACTOR};
use crate::error::{domain, Error, Result};

/// Largest instance [`exact_tsp`] accepts.
pub const EXACT_TSP_LIMIT: usize = 14;

/// Largest instance on which [`witness_tour`] minimises `Σ|e|²` exactly.
pub const EXACT_WITNESS_LIMIT: usize = 12;

const IMPROVE_EPS: f64 = 1e-12;
const MAX_PASSES: usize = 10_000;

/// Held-Karp over a dense row-major cost matrix. The tour starts at 0.
fn held_karp(m: &[f64], n: usize) -> Vec<usize> {
    if n <= 2 {
        return (0..n).collect();
    }
    // subsets of {1, .., n-1}; bit k stands for vertex k + 1
    let k = n - 1;
    let full = (1usize << k) - 1;
    let mut dp = vec![f64::INFINITY; (1 << k) * k];
    let mut parent = vec![u8::MAX; (1 << k) * k];
    for j in 0..k {
        dp[(1 << j) * k + j] = m[j + 1];
    }
    for mask in 1..=full {
        for j in 0..k {
            if mask & (1 << j) == 0 {
                continue;
            }
            let here = dp[mask * k + j];
            if !here.is_finite() {
                continue;
            }
            let mut rest = full & !mask;
            while rest != 0 {
                let t = rest.trailing_zeros() as usize;
                rest &= rest - 1;
                let next = mask | (1 << t);
                let cand = here + m[(j + 1) * n + t + 1];
                if cand < dp[next * k + t] {
                    dp[next * k + t] = cand;
                    parent[next * k + t] = j as u8;
                }
            }
        }
    }
    let (mut last, mut best) = (0, f64::INFINITY);
    for j in 0..k {
        let c = dp[full * k + j] + m[(j + 1) * n];
        if c < best {
            best = c;
            last = j;
        }
    }
    let mut order = Vec::with_capacity(n);
    let mut mask = full;
    let mut j = last;
    loop {
        order.push(j + 1);
        let p = parent[mask * k + j];
        mask &= !(1 << j);
        if p == u8::MAX {
            break;
        }
        j = p as usize;
    }
    order.push(0);
    order.reverse();
    order
}

/// Optimal tour under `l` by bitmask dynamic programming.
pub fn exact_tsp<L: CostFunction + ?Sized>(ps: &PointSet, l: &L) -> Result<Tour> {
    let n = ps.len();
    if n == 0 {
        return domain("a tour needs at least one point");
    }
    if n > EXACT_TSP_LIMIT {
        return Err(Error::Capacity { what: "exact tour", needed: n as u128, limit: EXACT_TSP_LIMIT as u128 });
    }
    let order = held_karp(&cost_matrix(ps, l), n);
    Tour::new(ps, order, l)
}

fn tour_cost(order: &[usize], m: &[f64], n: usize) -> f64 {
    (0..order.len()).map(|k| m[order[k] * n + order[(k + 1) % order.len()]]).sum()
}

/// One improving 2-opt move (symmetric costs only); true if applied.
fn two_opt_pass(order: &mut [usize], m: &[f64], n: usize) -> bool {
    let len = order.len();
    let mut improved = false;
    for i in 0..len.saturating_sub(2) {
        for j in i + 2..len {
            if i == 0 && j == len - 1 {
                continue;
            }
            let (a, b, c, d) = (order[i], order[i + 1], order[j], order[(j + 1) % len]);
            let delta = m[a * n + c] + m[b * n + d] - m[a * n + b] - m[c * n + d];
            if delta < -IMPROVE_EPS {
                order[i + 1..=j].reverse();
                improved = true;
            }
        }
    }
    improved
}

/// Moves segments of up to three consecutive points elsewhere without
/// reversing them, so it is valid for asymmetric costs.
fn or_opt_pass(order: &mut Vec<usize>, m: &[f64], n: usize) -> bool {
    let len = order.len();
    let mut improved = false;
    for seg in 1..=3usize {
        if len < seg + 3 {
            break;
        }
        let mut i = 0;
        while i < len {
            let pos = |p: usize| (i + p) % len;
            let prev = order[(i + len - 1) % len];
            let first = order[i];
            let last = order[pos(seg - 1)];
            let next = order[pos(seg)];
            let gain = m[prev * n + first] + m[last * n + next] - m[prev * n + next];
            let mut best: Option<(f64, usize)> = None;
            // edges (u, v) entirely outside the segment, starting after `next`
            for s in seg..len - 1 {
                let (u, v) = (order[pos(s)], order[pos(s + 1)]);
                let delta = m[u * n + first] + m[last * n + v] - m[u * n + v] - gain;
                if delta < -IMPROVE_EPS && best.is_none_or(|(d, _)| delta < d) {
                    best = Some((delta, s));
                }
            }
            if let Some((_, s)) = best {
                let rotated: Vec<usize> = (0..len).map(|p| order[pos(p)]).collect();
                let segment = &rotated[..seg];
                let mut out = Vec::with_capacity(len);
                for (p, &v) in rotated.iter().enumerate().skip(seg) {
                    out.push(v);
                    if p == s {
                        out.extend_from_slice(segment);
                    }
                }
                *order = out;
                improved = true;
            }
            i += 1;
        }
    }
    improved
}

fn local_search(mut order: Vec<usize>, m: &[f64], n: usize, symmetric: bool) -> Vec<usize> {
    for _ in 0..MAX_PASSES {
        let mut improved = false;
        if symmetric {
            improved |= two_opt_pass(&mut order, m, n);
        }
        improved |= or_opt_pass(&mut order, m, n);
        if !improved {
            break;
        }
    }
    order
}

/// Hilbert-order start improved to a local optimum: 2-opt and or-opt for
/// symmetric costs, or-opt alone otherwise.
pub fn heuristic_tsp<L: CostFunction + ?Sized>(ps: &PointSet, l: &L) -> Result<Tour> {
    let n = ps.len();
    if n < 2 {
        return domain("a tour needs at least two points");
    }
    let m = cost_matrix(ps, l);
    let start = space_filling_order(ps);
    let before = tour_cost(&start, &m, n);
    let order = local_search(start, &m, n, l.is_symmetric());
    debug_assert!(tour_cost(&order, &m, n) <= before + 1e-9);
    Tour::new(ps, order, l)
}

/// A tour with small `Σ|e|²`: exact minimiser up to [`EXACT_WITNESS_LIMIT`]
/// points, local search on squared lengths from the Hilbert order beyond.
/// Its cost field is Euclidean.
pub fn witness_tour(ps: &PointSet) -> Result<Tour> {
    let n = ps.len();
    if n == 0 {
        return domain("a tour needs at least one point");
    }
    let pts = ps.points();
    let mut m = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..n {
            m[i * n + j] = euclid_sq(pts[i], pts[j]);
        }
    }
    let order = if n <= EXACT_WITNESS_LIMIT {
        held_karp(&m, n)
    } else {
        local_search(space_filling_order(ps), &m, n, true)
    };
    Tour::new(ps, order, &Euclidean)
}

/// `αᵢ = 2 [L(prev(i), i) + L(i, next(i))]` along `tour`, indexed by point.
pub fn tsp_witness_alpha<L: CostFunction + ?Sized>(ps: &PointSet, tour: &Tour, l: &L) -> Vec<f64> {
    let n = tour.order.len();
    let mut alpha = vec![0.0; ps.len()];
    if n < 2 {
        return alpha;
    }
    for k in 0..n {
        let (p, i, s) = (tour.order[(k + n - 1) % n], tour.order[k], tour.order[(k + 1) % n]);
        alpha[i] = 2.0 * (l.cost(ps.get(p), ps.get(i)) + l.cost(ps.get(i), ps.get(s)));
    }
    alpha
}

#[derive(Debug, Clone, Serialize)]
pub struct TspWitnessReport {
    pub alpha: Vec<f64>,
    pub sum_sq_euclidean: f64,
    pub sum_sq_alpha: f64,
    /// `64 C²`.
    pub alpha_bound: f64,
    pub square_sum_ok: bool,
    pub alpha_ok: bool,
}

/// Builds the witness tour and checks `Σ|e|² ≤ 4` and `Σαᵢ² ≤ 64 C²`.
pub fn tsp_witness_check<L: CostFunction + ?Sized>(ps: &PointSet, l: &L) -> Result<TspWitnessReport> {
    let tour = witness_tour(ps)?;
    let alpha = tsp_witness_alpha(ps, &tour, l);
    let sum_sq_alpha = alpha.iter().map(|a| a * a).sum();
    let alpha_bound = TSP_WITNESS_FACTOR * l.ratio() * l.ratio();
    Ok(TspWitnessReport {
        square_sum_ok: tour.sum_sq_euclidean <= TOUR_SQUARE_SUM + 1e-12,
        alpha_ok: sum_sq_alpha <= alpha_bound * (1.0 + 1e-12),
        sum_sq_euclidean: tour.sum_sq_euclidean,
        sum_sq_alpha,
        alpha_bound,
        alpha,
    })
}

/// `T(y) - T(x) + Σ_{xᵢ≠yᵢ} αᵢ(x)` with exact optimal tours; the
/// Lipschitz inequality holds when this is nonnegative.
pub fn tsp_lipschitz_slack<L: CostFunction + ?Sized>(x: &PointSet, y: &PointSet, l: &L) -> Result<f64> {
    if x.len() != y.len() {
        return Err(Error::Dimension(x.len(), y.len()));
    }
    let tx = exact_tsp(x, l)?.cost;
    let ty = exact_tsp(y, l)?.cost;
    let alpha = tsp_witness_alpha(x, &witness_tour(x)?, l);
    let charged: f64 = (0..x.len()).filter(|&i| x.get(i) != y.get(i)).map(|i| alpha[i]).sum();
    Ok(ty - tx + charged)
}
