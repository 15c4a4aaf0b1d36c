//! Finite discrete laws, total variation distance and the sub-maximal
//! coupling `X = (1-χ)B + χC`, `Y = (1-χ)B + χD`.
//!
//! Given marginals `f`, `g` with `p = d_TV(f, g)` and any budget
//! `p ≤ q ≤ 1`, let `h = min(f, g)`. The three component laws are
//!
//! ```text
//! μ_B = h / (1 - p)
//! μ_C = (h (q - 1)/(1 - p) + f) / q
//! μ_D = (h (q - 1)/(1 - p) + g) / q
//! ```
//!
//! and `χ ~ Bernoulli(q)` is drawn independently of `B, C, D`. The joint
//! law is `(1-q)·diag(μ_B) + q·μ_C ⊗ μ_D`; with `q = p` it is a maximal
//! coupling and with `q = 1` the product coupling.
//!
//! The component computation is generic over [`Scalar`] so tests can run it
//! in exact rational arithmetic.

use num_traits::Num;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tolerance used when validating `f64` probability vectors.
pub const PROB_TOL: f64 = 1e-12;

/// Numeric types the coupling construction can run over.
pub trait Scalar: Num + Clone + PartialOrd {}
impl<T: Num + Clone + PartialOrd> Scalar for T {}

/// A probability vector over `0..support_size`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FiniteDistribution {
    probs: Vec<f64>,
}

impl FiniteDistribution {
    pub fn new(probs: Vec<f64>) -> Result<Self> {
        if probs.is_empty() {
            return Err(Error::InvalidDistribution("empty support".into()));
        }
        for (i, &p) in probs.iter().enumerate() {
            if !p.is_finite() || p < 0.0 {
                return Err(Error::InvalidDistribution(format!("entry {i} is {p}")));
            }
        }
        let s: f64 = probs.iter().sum();
        if (s - 1.0).abs() > PROB_TOL {
            return Err(Error::InvalidDistribution(format!("sum is {s}")));
        }
        Ok(Self { probs })
    }

    /// Normalizes nonnegative weights.
    pub fn from_weights(weights: &[f64]) -> Result<Self> {
        if weights.iter().any(|w| !w.is_finite() || *w < 0.0) {
            return Err(Error::InvalidDistribution("weights must be finite and nonnegative".into()));
        }
        let s: f64 = weights.iter().sum();
        if s <= 0.0 {
            return Err(Error::InvalidDistribution("weights sum to zero".into()));
        }
        Self::new(weights.iter().map(|w| w / s).collect())
    }

    pub fn uniform(k: usize) -> Result<Self> {
        if k == 0 {
            return Err(Error::InvalidDistribution("empty support".into()));
        }
        Ok(Self { probs: vec![1.0 / k as f64; k] })
    }

    pub fn point_mass(k: usize, at: usize) -> Result<Self> {
        if at >= k {
            return Err(Error::Domain(format!("point {at} outside support of size {k}")));
        }
        let mut probs = vec![0.0; k];
        probs[at] = 1.0;
        Ok(Self { probs })
    }

    /// Law on `{0, 1}` with `P(1) = p`.
    pub fn bernoulli(p: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::Domain(format!("bernoulli parameter {p} outside [0,1]")));
        }
        Ok(Self { probs: vec![1.0 - p, p] })
    }

    pub fn support_size(&self) -> usize {
        self.probs.len()
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn prob(&self, i: usize) -> f64 {
        self.probs[i]
    }

    pub fn mean_index(&self) -> f64 {
        self.probs.iter().enumerate().map(|(i, p)| i as f64 * p).sum()
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        sample_index(&self.probs, rng)
    }
}

/// Inverse-cdf draw from a nonnegative weight vector summing to about one.
pub(crate) fn sample_index<R: Rng + ?Sized>(probs: &[f64], rng: &mut R) -> usize {
    let u: f64 = rng.random();
    let mut acc = 0.0;
    let mut last = 0;
    for (i, &p) in probs.iter().enumerate() {
        if p > 0.0 {
            acc += p;
            last = i;
            if u < acc {
                return i;
            }
        }
    }
    last
}

/// `d_TV(p, q) = ½ Σ |p_i - q_i|`.
pub fn tv_distance(p: &FiniteDistribution, q: &FiniteDistribution) -> Result<f64> {
    if p.support_size() != q.support_size() {
        return Err(Error::Dimension(p.support_size(), q.support_size()));
    }
    Ok(tv_raw(p.probs(), q.probs()))
}

pub(crate) fn tv_raw(p: &[f64], q: &[f64]) -> f64 {
    let d: f64 = p.iter().zip(q).map(|(a, b)| (a - b).abs()).sum();
    (0.5 * d).min(1.0)
}

/// The three component laws of the coupling, over any [`Scalar`].
///
/// `shared` is `None` when `p = 1` (then `χ = 1` almost surely) and
/// `left`/`right` are `None` when `q = 0` (then `χ = 0` almost surely).
#[derive(Debug, Clone, PartialEq)]
pub struct CouplingComponents<T> {
    pub tv: T,
    pub q: T,
    pub shared: Option<Vec<T>>,
    pub left: Option<Vec<T>>,
    pub right: Option<Vec<T>>,
}

fn min_t<T: Scalar>(a: &T, b: &T) -> T {
    if a <= b {
        a.clone()
    } else {
        b.clone()
    }
}

/// Computes `μ_B`, `μ_C`, `μ_D` pointwise.
pub fn coupling_components<T: Scalar>(f: &[T], g: &[T], q: T) -> Result<CouplingComponents<T>> {
    if f.len() != g.len() {
        return Err(Error::Dimension(f.len(), g.len()));
    }
    let zero = T::zero();
    let one = T::one();
    if q < zero || q > one {
        return Err(Error::Domain("coupling budget q must lie in [0,1]".into()));
    }
    let h: Vec<T> = f.iter().zip(g).map(|(a, b)| min_t(a, b)).collect();
    // p = Σ (f - h) = d_TV(f, g)
    let tv = f.iter().zip(&h).fold(zero.clone(), |acc, (a, m)| acc + (a.clone() - m.clone()));
    if q < tv {
        return Err(Error::Infeasible("coupling budget q is below the total variation distance".into()));
    }
    let shared = if tv < one {
        let denom = one.clone() - tv.clone();
        Some(h.iter().map(|x| x.clone() / denom.clone()).collect())
    } else {
        None
    };
    let (left, right) = if q > zero {
        let scale = if tv < one {
            (q.clone() - one.clone()) / (one.clone() - tv.clone())
        } else {
            zero.clone()
        };
        let build = |m: &[T]| -> Vec<T> {
            m.iter()
                .zip(&h)
                .map(|(mi, hi)| (hi.clone() * scale.clone() + mi.clone()) / q.clone())
                .collect()
        };
        (Some(build(f)), Some(build(g)))
    } else {
        (None, None)
    };
    Ok(CouplingComponents { tv, q, shared, left, right })
}

/// Joint table `(1-q)·diag(μ_B) + q·μ_C ⊗ μ_D`, over any [`Scalar`].
pub fn coupling_joint<T: Scalar>(c: &CouplingComponents<T>) -> Vec<Vec<T>> {
    let k = c
        .shared
        .as_ref()
        .or(c.left.as_ref())
        .map(|v| v.len())
        .unwrap_or(0);
    let one = T::one();
    let mut joint = vec![vec![T::zero(); k]; k];
    if let Some(b) = &c.shared {
        let w = one.clone() - c.q.clone();
        for (x, bx) in b.iter().enumerate() {
            joint[x][x] = joint[x][x].clone() + w.clone() * bx.clone();
        }
    }
    if let (Some(l), Some(r)) = (&c.left, &c.right) {
        for (x, lx) in l.iter().enumerate() {
            for (y, ry) in r.iter().enumerate() {
                joint[x][y] = joint[x][y].clone() + c.q.clone() * lx.clone() * ry.clone();
            }
        }
    }
    joint
}

/// Joint law of `(X, Y)` under the coupling with budget `q`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CouplingTable {
    pub joint: Vec<Vec<f64>>,
    pub q: f64,
}

impl CouplingTable {
    pub fn row_sums(&self) -> Vec<f64> {
        self.joint.iter().map(|r| r.iter().sum()).collect()
    }

    pub fn col_sums(&self) -> Vec<f64> {
        let k = self.joint.len();
        (0..k).map(|y| self.joint.iter().map(|r| r[y]).sum()).collect()
    }

    /// `P(X ≠ Y)`.
    pub fn off_diagonal_mass(&self) -> f64 {
        let mut s = 0.0;
        for (x, row) in self.joint.iter().enumerate() {
            for (y, v) in row.iter().enumerate() {
                if x != y {
                    s += v;
                }
            }
        }
        s
    }
}

fn clamp_components(c: &mut CouplingComponents<f64>) {
    for v in [&mut c.shared, &mut c.left, &mut c.right].into_iter().flatten() {
        for x in v.iter_mut() {
            if *x < 0.0 {
                *x = 0.0;
            }
        }
    }
}

/// Sampler for the coupling in `f64`; `q` within [`PROB_TOL`] below the total
/// variation distance is accepted and lifted to it.
#[derive(Debug, Clone)]
pub struct LemmaCoupling {
    components: CouplingComponents<f64>,
}

impl LemmaCoupling {
    pub fn new(p: &FiniteDistribution, q_dist: &FiniteDistribution, q: f64) -> Result<Self> {
        if p.support_size() != q_dist.support_size() {
            return Err(Error::Dimension(p.support_size(), q_dist.support_size()));
        }
        if q > 1.0 + PROB_TOL {
            return Err(Error::Domain(format!("coupling budget {q} exceeds 1")));
        }
        let tv = tv_raw(p.probs(), q_dist.probs());
        if q < tv - PROB_TOL {
            return Err(Error::Infeasible(format!(
                "coupling budget {q} is below the total variation distance {tv}"
            )));
        }
        // the components use Σ (f - min(f, g)), which may differ from tv in the last ulp
        let inner: f64 = p.probs().iter().zip(q_dist.probs()).map(|(a, b)| a - a.min(*b)).sum();
        let q = q.max(tv).max(inner).min(1.0);
        let mut components = coupling_components(p.probs(), q_dist.probs(), q)?;
        clamp_components(&mut components);
        Ok(Self { components })
    }

    pub fn components(&self) -> &CouplingComponents<f64> {
        &self.components
    }

    /// Draws `(X, Y)` given the value of the switch `χ`.
    pub fn sample_given<R: Rng + ?Sized>(&self, chi: bool, rng: &mut R) -> (usize, usize) {
        let c = &self.components;
        match (chi, &c.shared, &c.left, &c.right) {
            (false, Some(b), _, _) => {
                let v = sample_index(b, rng);
                (v, v)
            }
            (_, _, Some(l), Some(r)) => (sample_index(l, rng), sample_index(r, rng)),
            // χ has probability zero on this branch; fall back to the other.
            (true, Some(b), _, _) => {
                let v = sample_index(b, rng);
                (v, v)
            }
            _ => unreachable!("coupling without any component"),
        }
    }

    /// Draws `χ ~ Bernoulli(q)` and then `(X, Y)`.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> (usize, usize) {
        let chi = rng.random::<f64>() < self.components.q;
        self.sample_given(chi, rng)
    }

    pub fn table(&self) -> CouplingTable {
        CouplingTable { joint: coupling_joint(&self.components), q: self.components.q }
    }
}

/// Builds the joint table realizing `X ~ p`, `Y ~ q_dist` with
/// `P(X ≠ Y) ≤ q`.
pub fn build_coupling(p: &FiniteDistribution, q_dist: &FiniteDistribution, q: f64) -> Result<CouplingTable> {
    Ok(LemmaCoupling::new(p, q_dist, q)?.table())
}
