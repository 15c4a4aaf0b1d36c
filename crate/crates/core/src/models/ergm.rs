//! Exponential random graph models with single-edge Glauber dynamics.
//!
//! The edge-triangle model has density proportional to
//! `exp(2β₁ E + (6β₂/n) Δ)`, so flipping slot `{i, j}` on changes the log
//! density by `2β₁ + (6β₂/n) · cn(i, j)` where `cn` counts common neighbours.
//! Other families are supported through [`DeltaErgm`], which only needs
//! that change.

use rand::Rng;

use crate::dobrushin::ConditionalModel;
use crate::error::{domain, Result};
use crate::finite_dist::FiniteDistribution;
use crate::models::graph::{edge_endpoints, edge_index, edge_slots, EdgeGraph};
use crate::space::ProductSpace;

pub fn sigmoid(t: f64) -> f64 {
    1.0 / (1.0 + (-t).exp())
}

/// Edge-triangle exponential random graph on `n` vertices.
#[derive(Debug, Clone)]
pub struct EdgeTriangleErgm {
    n: usize,
    beta1: f64,
    beta2: f64,
    endpoints: Vec<(usize, usize)>,
    space: ProductSpace,
}

impl EdgeTriangleErgm {
    pub fn new(n: usize, beta1: f64, beta2: f64) -> Result<Self> {
        if n < 2 {
            return domain("graph model needs at least two vertices");
        }
        if !(beta1.is_finite() && beta2.is_finite()) {
            return domain("parameters must be finite");
        }
        Ok(Self {
            n,
            beta1,
            beta2,
            endpoints: edge_endpoints(n),
            space: ProductSpace::binary(edge_slots(n)),
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Log-odds of slot `{i, j}` being present given `cn` common neighbours.
    pub fn log_odds(&self, common: usize) -> f64 {
        2.0 * self.beta1 + 6.0 * self.beta2 / self.n as f64 * common as f64
    }

    /// Unnormalized log density `2β₁E + (6β₂/n)Δ`.
    pub fn log_weight(&self, g: &EdgeGraph) -> f64 {
        2.0 * self.beta1 * g.edge_count() as f64
            + 6.0 * self.beta2 / self.n as f64 * g.triangle_count() as f64
    }

    fn common_in_state(&self, slot: usize, x: &[usize]) -> usize {
        let (i, j) = self.endpoints[slot];
        (0..self.n)
            .filter(|&k| k != i && k != j)
            .filter(|&k| x[edge_index(self.n, i, k)] == 1 && x[edge_index(self.n, j, k)] == 1)
            .count()
    }
}

impl ConditionalModel for EdgeTriangleErgm {
    fn space(&self) -> &ProductSpace {
        &self.space
    }

    fn conditional(&self, i: usize, x: &[usize]) -> Option<FiniteDistribution> {
        FiniteDistribution::bernoulli(sigmoid(self.log_odds(self.common_in_state(i, x)))).ok()
    }

    /// Slots sharing an endpoint with slot `i`.
    fn blanket(&self, i: usize) -> Option<Vec<usize>> {
        let (a, b) = self.endpoints[i];
        let mut out = Vec::with_capacity(2 * (self.n - 2));
        for k in 0..self.n {
            if k != a && k != b {
                out.push(edge_index(self.n, a, k));
                out.push(edge_index(self.n, b, k));
            }
        }
        Some(out)
    }
}

/// A general exponential random graph given by the change in the log
/// density when a slot is switched on, `delta(x, slot)`; `x[slot]` is ignored.
pub struct DeltaErgm<F>
where
    F: Fn(&[usize], usize) -> f64 + Sync,
{
    n: usize,
    delta: F,
    space: ProductSpace,
}

impl<F> DeltaErgm<F>
where
    F: Fn(&[usize], usize) -> f64 + Sync,
{
    pub fn new(n: usize, delta: F) -> Result<Self> {
        if n < 2 {
            return domain("graph model needs at least two vertices");
        }
        Ok(Self { n, delta, space: ProductSpace::binary(edge_slots(n)) })
    }

    pub fn n(&self) -> usize {
        self.n
    }
}

impl<F> ConditionalModel for DeltaErgm<F>
where
    F: Fn(&[usize], usize) -> f64 + Sync,
{
    fn space(&self) -> &ProductSpace {
        &self.space
    }

    fn conditional(&self, i: usize, x: &[usize]) -> Option<FiniteDistribution> {
        FiniteDistribution::bernoulli(sigmoid((self.delta)(x, i))).ok()
    }
}

/// One Glauber step of the edge-triangle model: pick a slot uniformly and
/// resample it from its conditional law.
pub fn ergm_glauber_step<R: Rng + ?Sized>(g: &EdgeGraph, beta1: f64, beta2: f64, rng: &mut R) -> Result<EdgeGraph> {
    let model = EdgeTriangleErgm::new(g.n_vertices(), beta1, beta2)?;
    let mut chain = ErgmChain::new(&model, g.clone())?;
    chain.step(rng);
    Ok(chain.graph().clone())
}

/// A Glauber chain of the edge-triangle model.
#[derive(Debug, Clone)]
pub struct ErgmChain<'a> {
    model: &'a EdgeTriangleErgm,
    graph: EdgeGraph,
}

impl<'a> ErgmChain<'a> {
    pub fn new(model: &'a EdgeTriangleErgm, graph: EdgeGraph) -> Result<Self> {
        if graph.n_vertices() != model.n {
            return domain(format!("graph has {} vertices, model has {}", graph.n_vertices(), model.n));
        }
        Ok(Self { model, graph })
    }

    pub fn step<R: Rng + ?Sized>(&mut self, rng: &mut R) {
        let slot = rng.random_range(0..self.model.endpoints.len());
        let (i, j) = self.model.endpoints[slot];
        let p = sigmoid(self.model.log_odds(self.graph.common_neighbours(i, j)));
        let on = rng.random::<f64>() < p;
        self.graph.set(i, j, on);
    }

    /// `steps` single-slot updates.
    pub fn run<R: Rng + ?Sized>(&mut self, steps: usize, rng: &mut R) {
        for _ in 0..steps {
            self.step(rng);
        }
    }

    /// One sweep: as many updates as there are slots.
    pub fn sweep<R: Rng + ?Sized>(&mut self, rng: &mut R) {
        self.run(self.model.endpoints.len(), rng);
    }

    pub fn graph(&self) -> &EdgeGraph {
        &self.graph
    }
}
