//! Two Glauber chains driven by a shared coordinate choice and coupled
//! through a Dobrushin matrix.
//!
//! At each step a coordinate `I` is chosen uniformly and an auxiliary
//! `ξ ∈ {0, e₁, …, eₙ}` takes the value `eᵢ` with probability `a_{I,i}`.
//! With `χ = ⟨ξ, L⟩` and `q = Σᵢ a_{I,i} Lᵢ`, where `L` marks disagreeing
//! coordinates, the new values at `I` are drawn from the `(χ, B, C, D)`
//! coupling of the two conditionals with disagreement budget `q`. This is
//! possible exactly when `q` dominates the total variation distance of the
//! conditionals, which is what a valid interdependence matrix guarantees.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::dobrushin::{ConditionalModel, InterdependenceMatrix};
use crate::error::{domain, Error, Result};
use crate::finite_dist::{tv_distance, LemmaCoupling};

/// Slack allowed when comparing `q` against the total variation distance.
pub const COUPLING_TOL: f64 = 1e-12;

/// Both chains and their disagreement indicator.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoupledChainState {
    pub x: Vec<usize>,
    pub y: Vec<usize>,
    pub disagreement: Vec<u8>,
    pub step: usize,
}

impl CoupledChainState {
    /// `‖L‖₁`.
    pub fn disagreements(&self) -> usize {
        self.disagreement.iter().map(|&l| l as usize).sum()
    }
}

pub struct CoupledGlauber<'a, M: ConditionalModel + ?Sized> {
    model: &'a M,
    matrix: &'a InterdependenceMatrix,
    state: CoupledChainState,
}

impl<'a, M: ConditionalModel + ?Sized> CoupledGlauber<'a, M> {
    pub fn new(model: &'a M, matrix: &'a InterdependenceMatrix, x0: Vec<usize>, y0: Vec<usize>) -> Result<Self> {
        let n = model.space().dim();
        if matrix.n() != n {
            return Err(Error::Dimension(matrix.n(), n));
        }
        if x0.len() != n || y0.len() != n {
            return Err(Error::Dimension(x0.len().max(y0.len()), n));
        }
        if !model.space().contains(&x0) || !model.space().contains(&y0) {
            return domain("initial states lie outside the state space");
        }
        if matrix.norm_inf > 1.0 + COUPLING_TOL {
            return domain(format!("coupling needs ‖A‖_∞ ≤ 1, got {}", matrix.norm_inf));
        }
        let disagreement = x0.iter().zip(&y0).map(|(a, b)| (a != b) as u8).collect();
        Ok(Self { model, matrix, state: CoupledChainState { x: x0, y: y0, disagreement, step: 0 } })
    }

    pub fn state(&self) -> &CoupledChainState {
        &self.state
    }

    /// Advances both chains by one coupled step.
    pub fn step<R: Rng + ?Sized>(&mut self, rng: &mut R) -> Result<()> {
        let n = self.state.x.len();
        let i = rng.random_range(0..n);
        let row = self.matrix.row(i);
        let u: f64 = rng.random();
        let mut acc = 0.0;
        let mut chi = false;
        for (j, &a) in row.iter().enumerate() {
            acc += a;
            if u < acc {
                chi = self.state.disagreement[j] == 1;
                break;
            }
        }
        let q: f64 = row.iter().zip(&self.state.disagreement).map(|(a, &l)| a * l as f64).sum();
        let (Some(px), Some(py)) = (self.model.conditional(i, &self.state.x), self.model.conditional(i, &self.state.y))
        else {
            return Err(Error::Degenerate(format!("conditional of coordinate {i} undefined at a chain state")));
        };
        let tv = tv_distance(&px, &py)?;
        if q < tv - COUPLING_TOL {
            return Err(Error::Infeasible(format!(
                "coordinate {i}: budget q = {q} below total variation {tv}; the matrix is not an interdependence matrix for the model"
            )));
        }
        let coupling = LemmaCoupling::new(&px, &py, q.min(1.0))?;
        let (a, b) = coupling.sample_given(chi, rng);
        self.state.x[i] = a;
        self.state.y[i] = b;
        self.state.disagreement[i] = (a != b) as u8;
        self.state.step += 1;
        Ok(())
    }

    /// Runs `steps` steps and returns `‖L(k)‖₁` for `k = 0, …, steps`.
    pub fn run_disagreements<R: Rng + ?Sized>(&mut self, steps: usize, rng: &mut R) -> Result<Vec<usize>> {
        let mut out = Vec::with_capacity(steps + 1);
        out.push(self.state.disagreements());
        for _ in 0..steps {
            self.step(rng)?;
            out.push(self.state.disagreements());
        }
        Ok(out)
    }
}

/// Runs the coupled chains from `(x0, y0)` and returns every state,
/// including the initial one.
pub fn coupled_glauber_run<M, R>(
    model: &M,
    matrix: &InterdependenceMatrix,
    x0: Vec<usize>,
    y0: Vec<usize>,
    steps: usize,
    rng: &mut R,
) -> Result<Vec<CoupledChainState>>
where
    M: ConditionalModel + ?Sized,
    R: Rng + ?Sized,
{
    let mut chain = CoupledGlauber::new(model, matrix, x0, y0)?;
    let mut out = Vec::with_capacity(steps + 1);
    out.push(chain.state().clone());
    for _ in 0..steps {
        chain.step(rng)?;
        out.push(chain.state().clone());
    }
    Ok(out)
}

/// The contraction envelope `n (1 - (1 - ‖A‖₁)/n)^k` for `E ‖L(k)‖₁`.
pub fn contraction_envelope(n: usize, norm1: f64, k: usize) -> f64 {
    n as f64 * (1.0 - (1.0 - norm1) / n as f64).powi(k as i32)
}
