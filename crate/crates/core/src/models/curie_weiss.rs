//! Curie-Weiss model on `{-1, +1}ⁿ` with density proportional to
//! `exp((β/n) Σ_{i<j} σᵢσⱼ + h Σ σᵢ)`.
//!
//! As a [`ConditionalModel`] spins are symbols `0 ↔ -1` and `1 ↔ +1`.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::dobrushin::ConditionalModel;
use crate::error::{domain, Result};
use crate::finite_dist::FiniteDistribution;
use crate::space::ProductSpace;

/// Largest `n` for the exact magnetization law.
pub const MAX_EXACT_SPINS: usize = 10_000;

/// `r(t) = e^t / (e^t + e^{-t}) = 1/(1 + e^{-2t})`.
pub fn r(t: f64) -> f64 {
    1.0 / (1.0 + (-2.0 * t).exp())
}

/// Spin vector with entries in `{-1, +1}`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SpinConfiguration {
    spins: Vec<i8>,
}

impl SpinConfiguration {
    pub fn new(spins: Vec<i8>) -> Result<Self> {
        if spins.iter().any(|&s| s != 1 && s != -1) {
            return domain("spins must be -1 or +1");
        }
        Ok(Self { spins })
    }

    pub fn all(n: usize, spin: i8) -> Result<Self> {
        Self::new(vec![spin; n])
    }

    pub fn from_symbols(x: &[usize]) -> Self {
        Self { spins: x.iter().map(|&s| if s == 0 { -1 } else { 1 }).collect() }
    }

    pub fn to_symbols(&self) -> Vec<usize> {
        self.spins.iter().map(|&s| (s > 0) as usize).collect()
    }

    pub fn spins(&self) -> &[i8] {
        &self.spins
    }

    pub fn n(&self) -> usize {
        self.spins.len()
    }

    pub fn sum(&self) -> i64 {
        self.spins.iter().map(|&s| s as i64).sum()
    }

    /// `m(σ) = (1/n) Σ σᵢ`.
    pub fn magnetization(&self) -> f64 {
        self.sum() as f64 / self.n() as f64
    }

    /// `n₋(σ)`, the number of `-1` spins.
    pub fn negative_count(&self) -> usize {
        self.spins.iter().filter(|&&s| s < 0).count()
    }
}

/// Parameters of the model.
#[derive(Debug, Clone, PartialEq)]
pub struct CurieWeiss {
    n: usize,
    beta: f64,
    h: f64,
    space: ProductSpace,
}

impl CurieWeiss {
    pub fn new(n: usize, beta: f64, h: f64) -> Result<Self> {
        if n == 0 {
            return domain("Curie-Weiss model needs at least one spin");
        }
        if !(beta >= 0.0 && beta.is_finite()) {
            return domain(format!("inverse temperature β must be finite and nonnegative, got {beta}"));
        }
        if !h.is_finite() {
            return domain(format!("external field must be finite, got {h}"));
        }
        Ok(Self { n, beta, h, space: ProductSpace::binary(n) })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    /// `P(σᵢ = +1 | σ_{-i})` given `Σ_{j≠i} σⱼ`.
    pub fn prob_plus_from_sum(&self, others: i64) -> f64 {
        r(self.beta * others as f64 / self.n as f64 + self.h)
    }

    /// Unnormalized log density.
    pub fn log_weight(&self, s: &SpinConfiguration) -> f64 {
        let k = s.sum() as f64;
        self.beta / (2.0 * self.n as f64) * (k * k - self.n as f64) + self.h * k
    }
}

impl ConditionalModel for CurieWeiss {
    fn space(&self) -> &ProductSpace {
        &self.space
    }

    fn conditional(&self, i: usize, x: &[usize]) -> Option<FiniteDistribution> {
        let others: i64 = x
            .iter()
            .enumerate()
            .filter(|&(j, _)| j != i)
            .map(|(_, &s)| if s == 0 { -1 } else { 1 })
            .sum();
        FiniteDistribution::bernoulli(self.prob_plus_from_sum(others)).ok()
    }
}

/// One heat-bath step: pick a coordinate uniformly and resample it from its
/// conditional law.
pub fn cw_glauber_step<R: Rng + ?Sized>(
    state: &SpinConfiguration,
    beta: f64,
    h: f64,
    rng: &mut R,
) -> Result<SpinConfiguration> {
    let model = CurieWeiss::new(state.n(), beta, h)?;
    let mut chain = CwChain::new(&model, state.clone())?;
    chain.step(rng);
    Ok(chain.state().clone())
}

/// A Glauber chain that tracks the spin sum for constant-time steps.
#[derive(Debug, Clone)]
pub struct CwChain<'a> {
    model: &'a CurieWeiss,
    state: SpinConfiguration,
    sum: i64,
}

impl<'a> CwChain<'a> {
    pub fn new(model: &'a CurieWeiss, state: SpinConfiguration) -> Result<Self> {
        if state.n() != model.n {
            return domain(format!("state has {} spins, model has {}", state.n(), model.n));
        }
        let sum = state.sum();
        Ok(Self { model, state, sum })
    }

    pub fn step<R: Rng + ?Sized>(&mut self, rng: &mut R) {
        let i = rng.random_range(0..self.model.n);
        let old = self.state.spins[i] as i64;
        let p = self.model.prob_plus_from_sum(self.sum - old);
        let new: i8 = if rng.random::<f64>() < p { 1 } else { -1 };
        self.sum += new as i64 - old;
        self.state.spins[i] = new;
    }

    pub fn run<R: Rng + ?Sized>(&mut self, steps: usize, rng: &mut R) {
        for _ in 0..steps {
            self.step(rng);
        }
    }

    pub fn state(&self) -> &SpinConfiguration {
        &self.state
    }

    pub fn sum(&self) -> i64 {
        self.sum
    }

    pub fn magnetization(&self) -> f64 {
        self.sum as f64 / self.model.n as f64
    }
}

/// Exact law of the spin sum `k = Σ σᵢ ∈ {-n, -n+2, …, n}`.
#[derive(Debug, Clone, PartialEq)]
pub struct MagnetizationLaw {
    n: usize,
    /// Index `j` is the number of `+1` spins; `k = 2j - n`.
    dist: FiniteDistribution,
}

/// Computes `P(Σσᵢ = k) ∝ C(n, (n+k)/2) exp((β/(2n))(k² - n) + hk)` in log space.
pub fn cw_exact_magnetization_law(n: usize, beta: f64, h: f64) -> Result<MagnetizationLaw> {
    let model = CurieWeiss::new(n, beta, h)?;
    if n > MAX_EXACT_SPINS {
        return domain(format!("exact magnetization law limited to n ≤ {MAX_EXACT_SPINS}, got {n}"));
    }
    let nf = n as f64;
    let mut log_w = Vec::with_capacity(n + 1);
    let mut log_binom = 0.0;
    for j in 0..=n {
        if j > 0 {
            log_binom += ((n - j + 1) as f64).ln() - (j as f64).ln();
        }
        let k = 2.0 * j as f64 - nf;
        log_w.push(log_binom + model.beta / (2.0 * nf) * (k * k - nf) + model.h * k);
    }
    let top = log_w.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let w: Vec<f64> = log_w.iter().map(|l| (l - top).exp()).collect();
    Ok(MagnetizationLaw { n, dist: FiniteDistribution::from_weights(&w)? })
}

/// Slack used when comparing magnetization values to thresholds.
const TAIL_SLACK: f64 = 1e-12;

impl MagnetizationLaw {
    pub fn n(&self) -> usize {
        self.n
    }

    /// Law over the number of `+1` spins.
    pub fn distribution(&self) -> &FiniteDistribution {
        &self.dist
    }

    /// Magnetization `m = (2j - n)/n` at index `j`.
    pub fn magnetization(&self, j: usize) -> f64 {
        (2.0 * j as f64 - self.n as f64) / self.n as f64
    }

    /// `P(m = (2j - n)/n)`.
    pub fn prob(&self, j: usize) -> f64 {
        self.dist.prob(j)
    }

    pub fn mean(&self) -> f64 {
        (0..=self.n).map(|j| self.prob(j) * self.magnetization(j)).sum()
    }

    /// `P(m ≥ E m + t)`.
    pub fn upper_tail(&self, t: f64) -> f64 {
        let cut = self.mean() + t - TAIL_SLACK;
        (0..=self.n).filter(|&j| self.magnetization(j) >= cut).map(|j| self.prob(j)).sum::<f64>().min(1.0)
    }

    /// `P(m ≤ E m - t)`.
    pub fn lower_tail(&self, t: f64) -> f64 {
        let cut = self.mean() - t + TAIL_SLACK;
        (0..=self.n).filter(|&j| self.magnetization(j) <= cut).map(|j| self.prob(j)).sum::<f64>().min(1.0)
    }

    /// Draws a magnetization.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        self.magnetization(self.dist.sample(rng))
    }
}
