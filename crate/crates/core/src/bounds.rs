//! Closed-form moment generating function and tail bounds for
//! self-bounding functions of weakly dependent variables, and the tail
//! bounds of the applications built on them.
//!
//! Every bound takes its dependence input as `‖A‖₁` (or `ρ` for random
//! subsets) and degrades to `1` as that norm approaches one. Probabilities
//! are capped at `1`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::io::Write;

use crate::dobrushin::fmt_f64;
use crate::error::{domain, Result};

/// Denominator of the dependent convex distance exponent rate.
pub const CONVEX_CONSTANT: f64 = 26.1;
/// Convex distance exponent rate for independent coordinates.
pub const INDEPENDENT_CONVEX_RATE: f64 = 0.25;
/// Convex distance exponent rate for uniform sampling without replacement.
pub const SWR_CONVEX_RATE: f64 = 1.0 / 16.0;
/// Bound on the sum of squared edge lengths of the space-filling tour.
pub const TOUR_SQUARE_SUM: f64 = 4.0;
/// `Σ αᵢ² ≤ 64 C²` for the tour witness.
pub const TSP_WITNESS_FACTOR: f64 = 64.0;
pub const TSP_CONSTANT: f64 = 1671.0;
/// Bound on the sum of squared minimum spanning tree edge lengths in the unit square.
pub const MST_SQUARE_SUM: f64 = 410.0;
/// Maximum degree of a Euclidean minimum spanning tree in the plane.
pub const MST_MAX_DEGREE: usize = 6;
/// `Σ αᵢ² ≤ 19680` for the spanning tree witness.
pub const MST_WITNESS_BOUND: f64 = 19680.0;
pub const STEINER_CONSTANT: f64 = 520_000.0;
pub const SWR_NONUNIFORM_CONSTANT: f64 = 16.0;
pub const SWR_TSP_CONSTANT: f64 = 1024.0;

/// Parameters shared by the self-bounding bounds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundSpec {
    pub a: f64,
    pub b: f64,
    /// `E g`.
    pub mean_g: f64,
    /// `‖A‖₁`.
    pub norm1: f64,
}

impl BoundSpec {
    pub fn new(a: f64, b: f64, mean_g: f64, norm1: f64) -> Result<Self> {
        let s = Self { a, b, mean_g, norm1 };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("a", self.a), ("b", self.b), ("E g", self.mean_g)] {
            if !(v.is_finite() && v >= 0.0) {
                return domain(format!("{name} must be finite and nonnegative, got {v}"));
            }
        }
        if !(self.norm1 >= 0.0 && self.norm1 < 1.0) {
            return domain(format!("Dobrushin condition ‖A‖₁ < 1 violated: ‖A‖₁ = {}", self.norm1));
        }
        Ok(())
    }

    /// `a E g + b`.
    pub fn budget(&self) -> f64 {
        self.a * self.mean_g + self.b
    }

    /// `1 - ‖A‖₁`.
    pub fn gap(&self) -> f64 {
        1.0 - self.norm1
    }

    /// `(D, C)` such that the star mgf bound reads `Dθ²/(2(1 - Cθ))`.
    pub fn star_params(&self) -> (f64, f64) {
        (self.budget() / self.gap(), self.a / self.gap())
    }

    /// `(D, C)` such that the weak mgf bound reads `Dθ²/(2(1 - Cθ))`.
    pub fn weak_params(&self) -> (f64, f64) {
        (2.0 * self.budget() / self.gap(), 2.0 * self.a / self.gap())
    }
}

fn check_t(t: f64) -> Result<()> {
    if !(t.is_finite() && t >= 0.0) {
        return domain(format!("threshold must be finite and nonnegative, got {t}"));
    }
    Ok(())
}

/// `exp(-num/den)` with the conventions `num = 0 ⇒ 1` and `den = 0 ⇒ 0`.
fn exp_neg_ratio(num: f64, den: f64) -> f64 {
    if num == 0.0 {
        1.0
    } else if den == 0.0 {
        0.0
    } else {
        (-num / den).exp().min(1.0)
    }
}

/// Log-mgf bound `Dθ²/(2(1 - Cθ))` for `0 ≤ θ < 1/C`.
pub fn bernstein_mgf(d: f64, c: f64, theta: f64) -> Result<f64> {
    if !(d >= 0.0 && c >= 0.0) {
        return domain(format!("need D, C ≥ 0, got D={d}, C={c}"));
    }
    if !(theta >= 0.0) || (c > 0.0 && theta * c >= 1.0) || !theta.is_finite() {
        return domain(format!("θ = {theta} outside [0, 1/C) with C = {c}"));
    }
    Ok(d * theta * theta / (2.0 * (1.0 - c * theta)))
}

/// `exp(-t²/(2(D + Ct)))`.
pub fn bernstein_tail(d: f64, c: f64, t: f64) -> Result<f64> {
    check_t(t)?;
    if !(d >= 0.0 && c >= 0.0) {
        return domain(format!("need D, C ≥ 0, got D={d}, C={c}"));
    }
    Ok(exp_neg_ratio(t * t, 2.0 * (d + c * t)))
}

/// The optimizing `θ = t/(D + Ct)` used to turn the mgf bound into a tail bound.
pub fn bernstein_theta(d: f64, c: f64, t: f64) -> f64 {
    t / (d + c * t)
}

/// Log-mgf bound for `(a,b)`-*-self-bounding functions, valid for
/// `0 ≤ θ ≤ (1 - ‖A‖₁)/a` (unbounded when `a = 0`).
pub fn mgf_star_upper(theta: f64, s: &BoundSpec) -> Result<f64> {
    s.validate()?;
    if !(theta >= 0.0 && theta.is_finite()) || (s.a > 0.0 && theta > s.gap() / s.a) {
        return domain(format!("θ = {theta} outside [0, (1-‖A‖₁)/a]"));
    }
    if theta == 0.0 {
        return Ok(0.0);
    }
    let den = 2.0 * (s.gap() - s.a * theta);
    if den <= 0.0 {
        return Ok(f64::INFINITY);
    }
    Ok(s.budget() * theta * theta / den)
}

/// Log-mgf bound for weakly `(a,b)`-*-self-bounding functions, valid for
/// `0 ≤ θ ≤ (1 - ‖A‖₁)/(2a)`.
pub fn mgf_weak_upper(theta: f64, s: &BoundSpec) -> Result<f64> {
    s.validate()?;
    if !(theta >= 0.0 && theta.is_finite()) || (s.a > 0.0 && theta > s.gap() / (2.0 * s.a)) {
        return domain(format!("θ = {theta} outside [0, (1-‖A‖₁)/(2a)]"));
    }
    if theta == 0.0 {
        return Ok(0.0);
    }
    let den = s.gap() - 2.0 * s.a * theta;
    if den <= 0.0 {
        return Ok(f64::INFINITY);
    }
    Ok(s.budget() * theta * theta / den)
}

/// Lower bound on `(log m)'(θ)` for `-(1 - ‖A‖₁)/(2a) < θ ≤ 0`, for weakly
/// self-bounding functions with one-coordinate increments at most one.
pub fn mgf_lower_log_derivative(theta: f64, s: &BoundSpec) -> Result<f64> {
    s.validate()?;
    let inner = s.gap() + 2.0 * s.a * theta;
    if !(theta <= 0.0 && theta.is_finite()) || inner <= 0.0 {
        return domain(format!("θ = {theta} outside (-(1-‖A‖₁)/(2a), 0]"));
    }
    let budget = s.budget();
    let bracket = budget - theta * s.a * budget / (2.0 * inner);
    Ok(-((-theta).exp() - 1.0) * 2.0 / s.gap() * bracket)
}

/// Upper tail for `(a,b)`-*-self-bounding functions.
pub fn tail_upper_star(t: f64, s: &BoundSpec) -> Result<f64> {
    check_t(t)?;
    s.validate()?;
    Ok(exp_neg_ratio(s.gap() * t * t, 2.0 * (s.budget() + s.a * t)))
}

/// Upper tail for weakly `(a,b)`-*-self-bounding functions.
pub fn tail_upper_weak(t: f64, s: &BoundSpec) -> Result<f64> {
    check_t(t)?;
    s.validate()?;
    Ok(exp_neg_ratio(s.gap() * t * t, 4.0 * (s.budget() + s.a * t)))
}

/// Which of the two lower-tail displays applies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum LowerRegime {
    /// `a ≥ a_c (1 - ‖A‖₁)`: sub-Gaussian display with constant 8.
    Gaussian,
    /// `a < a_c (1 - ‖A‖₁)`: Bernstein-type display.
    Bernstein,
}

pub fn lower_regime(s: &BoundSpec) -> LowerRegime {
    if s.a >= solve_ac() * s.gap() {
        LowerRegime::Gaussian
    } else {
        LowerRegime::Bernstein
    }
}

/// Lower tail `P(g ≤ E g - t)` for weakly `(a,b)`-*-self-bounding functions
/// whose one-coordinate increments are at most one (caller-asserted).
pub fn tail_lower(t: f64, s: &BoundSpec) -> Result<f64> {
    check_t(t)?;
    s.validate()?;
    let budget = s.budget();
    Ok(match lower_regime(s) {
        LowerRegime::Gaussian => exp_neg_ratio(s.gap() * t * t, 8.0 * budget),
        LowerRegime::Bernstein => exp_neg_ratio(t * t, 5.0 * budget / s.gap() + 2.0 / 3.0 * t),
    })
}

fn ac_equation(a: f64) -> f64 {
    let k = 1.0 / (4.0 * a);
    k.exp_m1() / k - 1.6
}

/// The unique positive `a_c` with `(e^{1/(4a)} - 1)/(1/(4a)) = 8/5`.
pub fn solve_ac() -> f64 {
    // The left side decreases from +∞ to 1 as a runs over (0, ∞).
    let (mut lo, mut hi) = (0.05_f64, 5.0_f64);
    while hi - lo > 1e-13 {
        let mid = 0.5 * (lo + hi);
        if ac_equation(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Residual of the defining equation of `a_c` at `a`.
pub fn ac_residual(a: f64) -> f64 {
    ac_equation(a)
}

/// `K_c = 1/(4 a_c)`, the root of `(e^K - 1)/K = 8/5`.
pub fn k_c() -> f64 {
    1.0 / (4.0 * solve_ac())
}

/// Right side `1/μ(S)` of the convex distance inequality.
pub fn convex_distance_rhs(mu_s: f64, norm1: f64) -> Result<f64> {
    if !(mu_s > 0.0 && mu_s <= 1.0) {
        return domain(format!("μ(S) must lie in (0, 1], got {mu_s}"));
    }
    convex_distance_rate(norm1)?;
    Ok(1.0 / mu_s)
}

/// Exponent rate `(1 - ‖A‖₁)/26.1` of the dependent convex distance inequality.
pub fn convex_distance_rate(norm1: f64) -> Result<f64> {
    if !(norm1 >= 0.0 && norm1 < 1.0) {
        return domain(format!("Dobrushin condition ‖A‖₁ < 1 violated: ‖A‖₁ = {norm1}"));
    }
    Ok((1.0 - norm1) / CONVEX_CONSTANT)
}

/// Two-sided median deviation bound `2 exp(-t²(1 - ‖A‖₁)/(26.1 C))`, capped at one.
pub fn nonuniform_tail(t: f64, c_budget: f64, norm1: f64) -> Result<f64> {
    check_t(t)?;
    if !(c_budget > 0.0 && c_budget.is_finite()) {
        return domain(format!("difference budget C must be positive, got {c_budget}"));
    }
    let rate = convex_distance_rate(norm1)?;
    Ok((2.0 * (-t * t * rate / c_budget).exp()).min(1.0))
}

fn check_rho(rho: f64) -> Result<()> {
    if !(rho >= 0.0 && rho < 1.0) {
        return domain(format!("inhomogeneity coefficient ρ < 1 required, got {rho}"));
    }
    Ok(())
}

fn check_cost_ratio(c: f64) -> Result<()> {
    if !(c >= 1.0 && c.is_finite()) {
        return domain(format!("cost ratio C ≥ 1 required, got {c}"));
    }
    Ok(())
}

fn binomial(n: u64, k: u64) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64).round()
}

/// The application tail bounds, each with the parameters of its display.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "which", rename_all = "SCREAMING_SNAKE_CASE")]
pub enum ApplicationBound {
    /// `4 exp(-t²(1 - ρ)/(1671 C²))` for the optimal tour around its median.
    Tsp { rho: f64, cost_ratio: f64 },
    /// `4 exp(-t²(1 - ρ)/520000)` for the Steiner length around its median.
    Steiner { rho: f64 },
    /// Curie-Weiss magnetization upper tail `P(m ≥ E m + t)`.
    CwUp { beta: f64, h: f64, n: usize },
    /// Curie-Weiss magnetization lower tail `P(m ≤ E m - t)`.
    CwLow { beta: f64, h: f64, n: usize },
    /// Subgraph count upper tail `P(N_S ≥ E N_S + t)`.
    SubgraphUp { norm1: f64, n: usize, motif_vertices: usize, motif_edges: usize, mean_count: f64 },
    /// Subgraph count lower tail `P(N_S ≤ E N_S - t)`.
    SubgraphLow { norm1: f64, n: usize, motif_vertices: usize, motif_edges: usize, mean_count: f64 },
    /// `4 exp(-t²/(16 C))` under uniform sampling without replacement.
    SwrConvex { c_budget: f64 },
    /// `4 exp(-t²/(1024 C²))` for the tour under uniform sampling without replacement.
    SwrTsp { cost_ratio: f64 },
}

impl ApplicationBound {
    pub fn name(&self) -> &'static str {
        match self {
            Self::Tsp { .. } => "TSP",
            Self::Steiner { .. } => "STEINER",
            Self::CwUp { .. } => "CW_UP",
            Self::CwLow { .. } => "CW_LOW",
            Self::SubgraphUp { .. } => "SUBGRAPH_UP",
            Self::SubgraphLow { .. } => "SUBGRAPH_LOW",
            Self::SwrConvex { .. } => "SWR_CONVEX",
            Self::SwrTsp { .. } => "SWR_TSP",
        }
    }

    /// Checks the hypotheses of the display.
    pub fn validate(&self) -> Result<()> {
        match *self {
            Self::Tsp { rho, cost_ratio } => {
                check_rho(rho)?;
                check_cost_ratio(cost_ratio)
            }
            Self::Steiner { rho } => check_rho(rho),
            Self::CwUp { beta, h, n } | Self::CwLow { beta, h, n } => {
                if !(beta >= 0.0 && beta < 1.0) {
                    return domain(format!("high temperature 0 ≤ β < 1 required, got β = {beta}"));
                }
                if !(h >= 0.0 && h.is_finite()) {
                    return domain(format!("external field h ≥ 0 required, got h = {h}"));
                }
                if n == 0 {
                    return domain("at least one spin required");
                }
                Ok(())
            }
            Self::SubgraphUp { norm1, n, motif_vertices, motif_edges, mean_count }
            | Self::SubgraphLow { norm1, n, motif_vertices, motif_edges, mean_count } => {
                if !(norm1 >= 0.0 && norm1 < 1.0) {
                    return domain(format!("Dobrushin condition ‖A‖₁ < 1 violated: ‖A‖₁ = {norm1}"));
                }
                if motif_vertices < 2 || motif_edges == 0 {
                    return domain("motif needs at least two vertices and one edge");
                }
                if motif_vertices > n {
                    return domain(format!("motif with {motif_vertices} vertices exceeds host with {n}"));
                }
                if !(mean_count >= 0.0 && mean_count.is_finite()) {
                    return domain(format!("E N_S must be nonnegative, got {mean_count}"));
                }
                Ok(())
            }
            Self::SwrConvex { c_budget } => {
                if !(c_budget > 0.0 && c_budget.is_finite()) {
                    return domain(format!("difference budget C must be positive, got {c_budget}"));
                }
                Ok(())
            }
            Self::SwrTsp { cost_ratio } => check_cost_ratio(cost_ratio),
        }
    }

    /// Evaluates the display at `t`, capped at one.
    pub fn eval(&self, t: f64) -> Result<f64> {
        check_t(t)?;
        self.validate()?;
        let t2 = t * t;
        let v = match *self {
            Self::Tsp { rho, cost_ratio } => {
                4.0 * (-t2 * (1.0 - rho) / (TSP_CONSTANT * cost_ratio * cost_ratio)).exp()
            }
            Self::Steiner { rho } => 4.0 * (-t2 * (1.0 - rho) / STEINER_CONSTANT).exp(),
            Self::CwUp { beta, h, n } => {
                let nf = n as f64;
                let slack = 1.0 - h.tanh() + 4.0 / ((1.0 - beta) * nf.sqrt());
                exp_neg_ratio(nf * (1.0 - beta) * t2, 16.0 * slack)
            }
            Self::CwLow { beta, h, n } => {
                let nf = n as f64;
                let slack = 1.0 - h.tanh() + 4.0 / ((1.0 - beta) * nf.sqrt());
                exp_neg_ratio(nf * (1.0 - beta) * t2, 4.0 * slack + 4.0 * t)
            }
            Self::SubgraphUp { norm1, n, motif_vertices, motif_edges, mean_count } => {
                let k = binomial(n as u64 - 2, motif_vertices as u64 - 2) * motif_edges as f64;
                exp_neg_ratio((1.0 - norm1) * t2, 2.0 * k * (mean_count + t))
            }
            Self::SubgraphLow { norm1, n, motif_vertices, motif_edges, mean_count } => {
                let k = binomial(n as u64 - 2, motif_vertices as u64 - 2) * motif_edges as f64;
                exp_neg_ratio((1.0 - norm1) * t2, 8.0 * k * mean_count)
            }
            Self::SwrConvex { c_budget } => 4.0 * (-t2 / (SWR_NONUNIFORM_CONSTANT * c_budget)).exp(),
            Self::SwrTsp { cost_ratio } => {
                4.0 * (-t2 / (SWR_TSP_CONSTANT * cost_ratio * cost_ratio)).exp()
            }
        };
        Ok(v.min(1.0))
    }
}

/// A bound evaluated on a threshold grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TailCurve {
    pub thresholds: Vec<f64>,
    pub values: Vec<f64>,
}

/// Checks that thresholds are finite, nonnegative and ascending.
pub fn check_thresholds(thresholds: &[f64]) -> Result<()> {
    if thresholds.iter().any(|t| !(t.is_finite() && *t >= 0.0)) {
        return domain("thresholds must be finite and nonnegative");
    }
    if thresholds.windows(2).any(|w| w[1] < w[0]) {
        return domain("thresholds must be ascending");
    }
    Ok(())
}

impl TailCurve {
    /// Evaluates `f` at every threshold, in parallel.
    pub fn evaluate(thresholds: &[f64], f: impl Fn(f64) -> Result<f64> + Sync) -> Result<Self> {
        check_thresholds(thresholds)?;
        let values = thresholds
            .par_iter()
            .map(|&t| f(t).map(|v| v.min(1.0)))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { thresholds: thresholds.to_vec(), values })
    }

    /// Writes `t,bound` records.
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut wtr = csv::Writer::from_writer(w);
        wtr.write_record(["t", "bound"])?;
        for (t, v) in self.thresholds.iter().zip(&self.values) {
            wtr.write_record([fmt_f64(*t), fmt_f64(*v)])?;
        }
        wtr.flush()?;
        Ok(())
    }
}

/// Evaluates an application display on a threshold grid.
pub fn application_tails(which: &ApplicationBound, thresholds: &[f64]) -> Result<TailCurve> {
    which.validate()?;
    TailCurve::evaluate(thresholds, |t| which.eval(t))
}

/// One arithmetic relation between the constants of the application bounds.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConstantCheck {
    pub name: String,
    pub lhs: f64,
    pub rhs: f64,
    pub relation: String,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConstantReport {
    pub checks: Vec<ConstantCheck>,
    pub all_pass: bool,
}

/// Verifies how the application constants compose from the witness bounds.
/// Comparisons are carried out in exact integer arithmetic (26.1 as 261/10).
pub fn constant_composition_checks() -> ConstantReport {
    let mut checks = Vec::new();
    let mut push = |name: &str, lhs_tenths: u64, rhs_tenths: u64, relation: &str| {
        let pass = match relation {
            "<=" => lhs_tenths <= rhs_tenths,
            "==" => lhs_tenths == rhs_tenths,
            _ => unreachable!(),
        };
        checks.push(ConstantCheck {
            name: name.to_string(),
            lhs: lhs_tenths as f64 / 10.0,
            rhs: rhs_tenths as f64 / 10.0,
            relation: relation.to_string(),
            pass,
        });
    };
    // 26.1 · 64 ≤ 1671: convex rate times the tour witness square sum
    push("tsp: 26.1*64 <= 1671", 261 * 64, 16_710, "<=");
    // 26.1 · 19680 ≤ 520000: convex rate times the spanning tree witness bound
    push("steiner: 26.1*19680 <= 520000", 261 * 19_680, 5_200_000, "<=");
    // 6 · 2² · 2 · 410 = 19680
    push("mst witness: 6*4*2*410 == 19680", 10 * 6 * 4 * 2 * 410, 196_800, "==");
    // 16 · 64 = 1024
    push("swr tsp: 16*64 == 1024", 10 * 16 * 64, 10_240, "==");
    // 4 · 4² = 64: tour witness αᵢ ≤ 2(two incident edges), squared and summed
    push("tour witness: 16*4 == 64", 10 * 16 * 4, 640, "==");
    let all_pass = checks.iter().all(|c| c.pass);
    ConstantReport { checks, all_pass }
}

/// Convenience: the upper tail for a general Lipschitz functional.
pub fn tail_upper(t: f64, s: &BoundSpec, weak: bool) -> Result<f64> {
    if weak {
        tail_upper_weak(t, s)
    } else {
        tail_upper_star(t, s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(a: f64, b: f64, eg: f64, n1: f64) -> BoundSpec {
        BoundSpec::new(a, b, eg, n1).unwrap()
    }

    #[test]
    fn mgf_examples() {
        let s = spec(1.0, 0.0, 100.0, 0.0);
        assert_eq!(mgf_star_upper(0.0, &s).unwrap(), 0.0);
        assert!((mgf_star_upper(0.25, &s).unwrap() - 6.25 / 1.5).abs() < 1e-12);
        assert!((mgf_weak_upper(0.25, &s).unwrap() - 12.5).abs() < 1e-12);
        let s = spec(0.0, 1.0, 0.0, 0.5);
        assert!((mgf_star_upper(2.0, &s).unwrap() - 4.0).abs() < 1e-12);
        let s = spec(4.0, 0.0, 1.0, 0.0);
        assert!((mgf_weak_upper(0.1, &s).unwrap() - 0.2).abs() < 1e-12);
        assert!(mgf_weak_upper(0.2, &s).is_err());
        assert!(mgf_star_upper(-0.1, &s).is_err());
    }

    #[test]
    fn tail_examples() {
        let s = spec(1.0, 0.0, 100.0, 0.0);
        assert_eq!(tail_upper_star(0.0, &s).unwrap(), 1.0);
        assert!((tail_upper_star(20.0, &s).unwrap() - (-400.0f64 / 240.0).exp()).abs() < 1e-12);
        assert!((tail_lower(20.0, &s).unwrap() - (-0.5f64).exp()).abs() < 1e-12);
        let s = spec(0.1, 0.0, 100.0, 0.0);
        assert_eq!(lower_regime(&s), LowerRegime::Bernstein);
        assert!((tail_lower(20.0, &s).unwrap() - (-400.0 / (50.0 + 40.0 / 3.0f64)).exp()).abs() < 1e-12);
        let s = spec(4.0, 0.0, 1.0, 0.0);
        assert!((tail_upper_weak(2.0, &s).unwrap() - (-1.0f64 / 12.0).exp()).abs() < 1e-12);
    }

    #[test]
    fn ac_root() {
        let ac = solve_ac();
        assert!(ac > 0.285 && ac < 0.286, "{ac}");
        assert!(ac_residual(ac).abs() < 1e-10);
        let k = k_c();
        assert!((k.exp_m1() / k - 1.6).abs() < 1e-10);
    }

    #[test]
    fn bernstein_examples() {
        assert!((bernstein_tail(1.0, 0.0, 2.0).unwrap() - (-2.0f64).exp()).abs() < 1e-15);
        assert_eq!(bernstein_tail(1.0, 3.0, 0.0).unwrap(), 1.0);
        assert!((bernstein_tail(2.0, 1.0, 2.0).unwrap() - (-0.5f64).exp()).abs() < 1e-15);
    }

    #[test]
    fn convex_examples() {
        assert_eq!(convex_distance_rhs(1.0, 0.3).unwrap(), 1.0);
        assert_eq!(convex_distance_rhs(0.5, 0.0).unwrap(), 2.0);
        assert!((convex_distance_rate(0.0).unwrap() - 1.0 / 26.1).abs() < 1e-16);
        assert!(convex_distance_rhs(0.0, 0.0).is_err());
        assert!(convex_distance_rate(1.0).is_err());
        assert!((nonuniform_tail(40.0, 64.0, 0.0).unwrap() - 2.0 * (-1600.0f64 / 1670.4).exp()).abs() < 1e-12);
        assert_eq!(nonuniform_tail(0.0, 64.0, 0.0).unwrap(), 1.0);
    }

    #[test]
    fn application_examples() {
        let tsp = ApplicationBound::Tsp { rho: 4.0 / 7.0, cost_ratio: 1.0 };
        let want = 4.0 * (-2500.0 * (3.0 / 7.0) / 1671.0f64).exp();
        assert!((tsp.eval(50.0).unwrap() - want.min(1.0)).abs() < 1e-12);
        assert!((tsp.eval(80.0).unwrap() - 4.0 * (-6400.0 * (3.0 / 7.0) / 1671.0f64).exp()).abs() < 1e-12);
        let cw = ApplicationBound::CwUp { beta: 0.5, h: 0.0, n: 100 };
        let want = (-100.0 * 0.5 * 0.04 / (16.0 * 1.8f64)).exp();
        assert!((cw.eval(0.2).unwrap() - want).abs() < 1e-12);
        let sub = ApplicationBound::SubgraphLow {
            norm1: 0.2,
            n: 10,
            motif_vertices: 3,
            motif_edges: 3,
            mean_count: 15.0,
        };
        assert!((sub.eval(10.0).unwrap() - (-80.0f64 / 2880.0).exp()).abs() < 1e-12);
        assert!(ApplicationBound::Tsp { rho: 1.0, cost_ratio: 1.0 }.validate().is_err());
        assert!(ApplicationBound::CwLow { beta: 1.0, h: 0.0, n: 5 }.validate().is_err());
    }

    #[test]
    fn constants_compose() {
        let r = constant_composition_checks();
        assert!(r.all_pass, "{r:?}");
        assert!((r.checks[0].lhs - 1670.4).abs() < 1e-9);
        assert!((r.checks[1].lhs - 513_648.0).abs() < 1e-6);
    }

    #[test]
    fn application_json_tag() {
        let b: ApplicationBound = serde_json::from_str(r#"{"which":"SWR_TSP","cost_ratio":2.0}"#).unwrap();
        assert_eq!(b, ApplicationBound::SwrTsp { cost_ratio: 2.0 });
    }
}
