//! Experiment configuration, read from JSON.

use serde::{Deserialize, Serialize};
use std::io::Read;

use crate::bounds::check_thresholds;
use crate::error::{domain, Result};
use crate::geometry::{CostSpec, PointSet};
use crate::models::GraphMotif;
use crate::rng::derive_seed;

fn default_confidence() -> f64 {
    0.99
}

fn default_chains() -> usize {
    8
}

/// Everything needed to reproduce one experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    #[serde(flatten)]
    pub model: ModelConfig,
    pub thresholds: Vec<f64>,
    pub replicas: usize,
    pub seed: u64,
    /// Glauber steps discarded before the first draw.
    #[serde(default)]
    pub burn_in: usize,
    /// Glauber steps between successive draws of one chain.
    #[serde(default)]
    pub thinning: usize,
    /// Independent chains for Glauber samplers; fixed so that results do
    /// not depend on the thread count.
    #[serde(default = "default_chains")]
    pub chains: usize,
    #[serde(default = "default_confidence")]
    pub confidence: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CwSampler {
    /// Draws from the exact magnetization law.
    #[default]
    Exact,
    Glauber,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TourSolver {
    /// Exact up to the exact-solver limit, local search beyond.
    #[default]
    Auto,
    Exact,
    Heuristic,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "shape", rename_all = "snake_case")]
pub enum MotifSpec {
    Edge,
    Triangle,
    Path { k: usize },
    Cycle { k: usize },
    Custom { vertices: usize, edges: Vec<(usize, usize)> },
}

impl Default for MotifSpec {
    fn default() -> Self {
        Self::Triangle
    }
}

impl MotifSpec {
    pub fn build(&self) -> Result<GraphMotif> {
        match self {
            Self::Edge => Ok(GraphMotif::edge()),
            Self::Triangle => Ok(GraphMotif::triangle()),
            Self::Path { k } => GraphMotif::path(*k),
            Self::Cycle { k } => GraphMotif::cycle(*k),
            Self::Custom { vertices, edges } => GraphMotif::new(*vertices, edges.clone()),
        }
    }
}

/// The ground set of a geometric experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "layout", rename_all = "snake_case")]
pub enum PointsSpec {
    Grid { cols: usize, rows: usize },
    /// Uniform points drawn once from a stream derived from the experiment seed.
    Random { count: usize },
    Explicit { points: Vec<[f64; 2]> },
}

impl PointsSpec {
    pub fn build(&self, seed: u64) -> Result<PointSet> {
        match self {
            Self::Grid { cols, rows } => PointSet::grid(*cols, *rows),
            Self::Random { count } => {
                let mut rng = crate::rng::stream_rng(derive_seed(seed, "universe"), 0);
                Ok(PointSet::random(*count, &mut rng))
            }
            Self::Explicit { points } => PointSet::new(points.clone()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "law", rename_all = "snake_case")]
pub enum ConvexModel {
    /// `n` independent bits, each one with probability `p`.
    IndependentBits { n: usize, p: f64 },
    /// Ordered uniform sample of `n` distinct items from `0..universe`.
    UniformSwr { universe: usize, n: usize },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "set", rename_all = "snake_case")]
pub enum ConvexSet {
    /// Points within Hamming distance `radius` of the all-zero point.
    HammingBall { radius: usize },
    /// Ordered samples that contain `element`.
    ContainsElement { element: usize },
    Explicit { points: Vec<Vec<usize>> },
}

/// The model and functional of an experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "SCREAMING_SNAKE_CASE")]
pub enum ModelConfig {
    /// Curie-Weiss magnetization.
    Cw {
        n: usize,
        beta: f64,
        #[serde(default)]
        h: f64,
        #[serde(default)]
        sampler: CwSampler,
    },
    /// Motif count under the edge-triangle ERGM.
    Ergm {
        n: usize,
        beta1: f64,
        beta2: f64,
        #[serde(default)]
        motif: MotifSpec,
    },
    /// Optimal tour length through a sample without replacement.
    Tsp {
        points: PointsSpec,
        n: usize,
        #[serde(default = "euclidean")]
        cost: CostSpec,
        #[serde(default)]
        solver: TourSolver,
    },
    /// Spanning tree length (Steiner upper bound) of a sample without replacement.
    Steiner { points: PointsSpec, n: usize },
    /// Sum of item values over a sample without replacement.
    Swr {
        universe: usize,
        n: usize,
        /// Item values in `[0, 1]`; defaults to `j/(N-1)`.
        #[serde(default)]
        values: Option<Vec<f64>>,
        /// Sampling weights; uniform when absent.
        #[serde(default)]
        weights: Option<Vec<f64>>,
    },
    /// Convex distance to a fixed set.
    Convex {
        #[serde(flatten)]
        model: ConvexModel,
        #[serde(flatten)]
        set: ConvexSet,
        /// Overrides the default exponent rate.
        #[serde(default)]
        rate: Option<f64>,
    },
    /// Coupled Glauber chains for Curie-Weiss; thresholds are step counts.
    Coupling {
        n: usize,
        beta: f64,
        #[serde(default)]
        h: f64,
    },
}

fn euclidean() -> CostSpec {
    CostSpec::Euclidean
}

impl ModelConfig {
    pub fn kind(&self) -> &'static str {
        match self {
            Self::Cw { .. } => "CW",
            Self::Ergm { .. } => "ERGM",
            Self::Tsp { .. } => "TSP",
            Self::Steiner { .. } => "STEINER",
            Self::Swr { .. } => "SWR",
            Self::Convex { .. } => "CONVEX",
            Self::Coupling { .. } => "COUPLING",
        }
    }
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        if self.replicas == 0 {
            return domain("replicas must be at least 1");
        }
        if self.chains == 0 {
            return domain("chains must be at least 1");
        }
        if !(self.confidence > 0.0 && self.confidence < 1.0) {
            return domain(format!("confidence must lie in (0, 1), got {}", self.confidence));
        }
        check_thresholds(&self.thresholds)?;
        if let ModelConfig::Coupling { .. } = self.model {
            if self.thresholds.iter().any(|t| t.fract() != 0.0) {
                return domain("coupling thresholds are step counts and must be integers");
            }
        }
        Ok(())
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let cfg: Self = serde_json::from_str(s)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn read_json<R: Read>(r: R) -> Result<Self> {
        let cfg: Self = serde_json::from_reader(r)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}
