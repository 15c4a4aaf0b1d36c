//! Exhaustive verification of self-bounding properties on small product
//! spaces, and the witnesses used by the applications.
//!
//! For the `*` classes the caller supplies the witnesses `αᵢ(x)`; for the
//! plain classes `gᵢ` is the coordinatewise infimum
//! `gᵢ(x_{-i}) = inf_{x'ᵢ} g(x₁, …, x'ᵢ, …, xₙ)`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::models::graph::{motif_copies, EdgeGraph, GraphMotif};
use crate::space::ProductSpace;

/// Pair checks allowed per verification.
pub const PAIR_CAPACITY: u128 = 100_000_000;

/// Slack below which a margin counts as a violation.
pub const VERIFY_TOL: f64 = 1e-9;

/// The four self-bounding classes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Variant {
    /// `(a,b)`-self-bounding.
    Sb,
    /// Weakly `(a,b)`-self-bounding.
    Wsb,
    /// `(a,b)`-*-self-bounding.
    Star,
    /// Weakly `(a,b)`-*-self-bounding.
    Wstar,
}

/// Which defining condition a violation breaks.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Condition {
    /// Witness or increment outside its allowed range.
    Range,
    /// `g(x) - g(y) ≤ Σ_{xᵢ≠yᵢ} αᵢ(x)`.
    Lipschitz,
    /// Linear budget `Σ ≤ a g(x) + b`.
    Budget,
    /// Squared budget `Σ (·)² ≤ a g(x) + b`.
    SquaredBudget,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairMargin {
    pub x: Vec<usize>,
    pub y: Vec<usize>,
    pub margin: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointMargin {
    pub x: Vec<usize>,
    pub margin: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    pub condition: Condition,
    pub x: Vec<usize>,
    pub y: Option<Vec<usize>>,
    pub margin: f64,
}

/// Outcome of an exhaustive verification. Margins are right side minus left
/// side, so negative margins are violations.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub variant: Variant,
    pub holds: bool,
    /// Pair with the smallest Lipschitz margin (ties: first in enumeration order).
    pub worst_pair: Option<PairMargin>,
    /// Point with the smallest budget margin.
    pub worst_point: Option<PointMargin>,
    /// First violation in enumeration order of `x`, then `y`.
    pub first_violation: Option<Violation>,
    pub checked_pairs: u64,
    pub checked_points: u64,
}

impl VerificationReport {
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

/// A function on a product space together with its claimed class.
pub struct WitnessedFunction<G, W>
where
    G: Fn(&[usize]) -> f64 + Sync,
    W: Fn(&[usize]) -> Vec<f64> + Sync,
{
    pub g: G,
    pub alpha: W,
    pub a: f64,
    pub b: f64,
    pub variant: Variant,
}

fn check_capacity(space: &ProductSpace) -> Result<()> {
    let len = space.require_len("self-bounding pair checks", PAIR_CAPACITY)? as u128;
    if len * len > PAIR_CAPACITY {
        return Err(Error::Capacity { what: "self-bounding pair checks", needed: len * len, limit: PAIR_CAPACITY });
    }
    Ok(())
}

#[derive(Default)]
struct Local {
    worst_pair: Option<(f64, usize)>,
    worst_point: Option<f64>,
    first: Option<Violation>,
    pairs: u64,
}

fn better(a: Option<(f64, usize)>, margin: f64, y: usize) -> Option<(f64, usize)> {
    match a {
        Some((m, _)) if m <= margin => a,
        _ => Some((margin, y)),
    }
}

/// Checks the `*` conditions (or their weak versions) over every point and
/// every ordered pair of `space`.
pub fn verify_star<G, W>(w: &WitnessedFunction<G, W>, space: &ProductSpace) -> Result<VerificationReport>
where
    G: Fn(&[usize]) -> f64 + Sync,
    W: Fn(&[usize]) -> Vec<f64> + Sync,
{
    let weak = match w.variant {
        Variant::Star => false,
        Variant::Wstar => true,
        v => return Err(Error::Domain(format!("verify_star needs a STAR or WSTAR variant, got {v:?}"))),
    };
    check_capacity(space)?;
    let n = space.dim();
    let states: Vec<Vec<usize>> = space.states().collect();
    let g: Vec<f64> = states.par_iter().map(|x| (w.g)(x)).collect();
    let alpha: Vec<Vec<f64>> = states.par_iter().map(|x| (w.alpha)(x)).collect();
    if let Some(bad) = alpha.iter().find(|a| a.len() != n) {
        return Err(Error::Dimension(bad.len(), n));
    }

    let locals: Vec<Local> = (0..states.len())
        .into_par_iter()
        .map(|xi| {
            let x = &states[xi];
            let ax = &alpha[xi];
            let mut local = Local::default();
            // (i): range of the witnesses
            let range_margin = if weak {
                ax.iter().map(|&v| v).fold(f64::INFINITY, f64::min)
            } else {
                ax.iter().map(|&v| v.min(1.0 - v)).fold(f64::INFINITY, f64::min)
            };
            if range_margin < -VERIFY_TOL {
                local.first = Some(Violation { condition: Condition::Range, x: x.clone(), y: None, margin: range_margin });
            }
            // (iii) or (iii')
            let spent: f64 = if weak { ax.iter().map(|v| v * v).sum() } else { ax.iter().sum() };
            let budget_margin = w.a * g[xi] + w.b - spent;
            local.worst_point = Some(budget_margin);
            if budget_margin < -VERIFY_TOL && local.first.is_none() {
                let condition = if weak { Condition::SquaredBudget } else { Condition::Budget };
                local.first = Some(Violation { condition, x: x.clone(), y: None, margin: budget_margin });
            }
            // (ii)
            for (yi, y) in states.iter().enumerate() {
                if yi == xi {
                    continue;
                }
                let rhs: f64 = (0..n).filter(|&i| x[i] != y[i]).map(|i| ax[i]).sum();
                let margin = rhs - (g[xi] - g[yi]);
                local.pairs += 1;
                local.worst_pair = better(local.worst_pair, margin, yi);
                if margin < -VERIFY_TOL && local.first.is_none() {
                    local.first = Some(Violation {
                        condition: Condition::Lipschitz,
                        x: x.clone(),
                        y: Some(y.clone()),
                        margin,
                    });
                }
            }
            local
        })
        .collect();
    Ok(assemble(w.variant, &states, locals))
}

fn assemble(variant: Variant, states: &[Vec<usize>], locals: Vec<Local>) -> VerificationReport {
    let mut worst_pair: Option<(f64, usize, usize)> = None;
    let mut worst_point: Option<(f64, usize)> = None;
    let mut first_violation = None;
    let mut checked_pairs = 0;
    for (xi, local) in locals.into_iter().enumerate() {
        checked_pairs += local.pairs;
        if let Some((m, yi)) = local.worst_pair {
            if worst_pair.is_none_or(|(wm, _, _)| m < wm) {
                worst_pair = Some((m, xi, yi));
            }
        }
        if let Some(m) = local.worst_point {
            if worst_point.is_none_or(|(wm, _)| m < wm) {
                worst_point = Some((m, xi));
            }
        }
        if first_violation.is_none() {
            first_violation = local.first;
        }
    }
    VerificationReport {
        variant,
        holds: first_violation.is_none(),
        worst_pair: worst_pair.map(|(margin, xi, yi)| PairMargin {
            x: states[xi].clone(),
            y: states[yi].clone(),
            margin,
        }),
        worst_point: worst_point.map(|(margin, xi)| PointMargin { x: states[xi].clone(), margin }),
        first_violation,
        checked_pairs,
        checked_points: states.len() as u64,
    }
}

/// Checks `(a,b)`-self-bounding (or weakly, with `weak`) using the infimum
/// `gᵢ`. Pairs are not involved; `worst_point` carries the budget margin.
pub fn verify_sb<G>(g: G, space: &ProductSpace, a: f64, b: f64, weak: bool) -> Result<VerificationReport>
where
    G: Fn(&[usize]) -> f64 + Sync,
{
    check_capacity(space)?;
    let n = space.dim();
    let states: Vec<Vec<usize>> = space.states().collect();
    let gv: Vec<f64> = states.par_iter().map(|x| g(x)).collect();
    let locals: Vec<Local> = (0..states.len())
        .into_par_iter()
        .map(|xi| {
            let x = &states[xi];
            let mut local = Local::default();
            let mut increments = Vec::with_capacity(n);
            for i in 0..n {
                let base = xi - x[i] * space.stride(i);
                let gi = (0..space.sizes()[i])
                    .map(|v| gv[base + v * space.stride(i)])
                    .fold(f64::INFINITY, f64::min);
                increments.push(gv[xi] - gi);
            }
            if !weak {
                let range_margin =
                    increments.iter().map(|&d| d.min(1.0 - d)).fold(f64::INFINITY, f64::min);
                if range_margin < -VERIFY_TOL {
                    local.first =
                        Some(Violation { condition: Condition::Range, x: x.clone(), y: None, margin: range_margin });
                }
            }
            let spent: f64 = if weak { increments.iter().map(|d| d * d).sum() } else { increments.iter().sum() };
            let margin = a * gv[xi] + b - spent;
            local.worst_point = Some(margin);
            if margin < -VERIFY_TOL && local.first.is_none() {
                let condition = if weak { Condition::SquaredBudget } else { Condition::Budget };
                local.first = Some(Violation { condition, x: x.clone(), y: None, margin });
            }
            local
        })
        .collect();
    Ok(assemble(if weak { Variant::Wsb } else { Variant::Sb }, &states, locals))
}

/// Witness for `N_S / C(n-2, n_S-2)`: for each edge slot, the number of
/// counted copies whose canonical embedding uses that edge, divided by
/// `C(n-2, n_S-2)`. The witnesses sum to `e_S N_S(x) / C(n-2, n_S-2)`.
pub fn subgraph_witness(g: &EdgeGraph, motif: &GraphMotif) -> Result<Vec<f64>> {
    let copies = motif_copies(g, motif)?;
    let scale = subgraph_scale(g.n_vertices(), motif);
    let mut alpha = vec![0.0; g.indicators().len()];
    for c in copies {
        for s in c.edge_slots {
            alpha[s] += 1.0;
        }
    }
    for a in &mut alpha {
        *a /= scale;
    }
    Ok(alpha)
}

/// `C(n-2, n_S-2)`.
pub fn subgraph_scale(n: usize, motif: &GraphMotif) -> f64 {
    let (top, k) = ((n - 2) as u64, (motif.vertices() - 2) as u64);
    let k = k.min(top - k);
    (0..k).fold(1.0, |acc, i| acc * (top - i) as f64 / (i + 1) as f64).round()
}

/// Number of `-1` spins with its `(1,0)`-* witness `αᵢ(σ) = 1[σᵢ = -1]`.
/// Spins are encoded as symbols `0 ↔ -1`, `1 ↔ +1`.
pub fn negative_spin_count(x: &[usize]) -> f64 {
    x.iter().filter(|&&s| s == 0).count() as f64
}

pub fn negative_spin_witness(x: &[usize]) -> Vec<f64> {
    x.iter().map(|&s| if s == 0 { 1.0 } else { 0.0 }).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn negative_spins_are_star_self_bounding() {
        for n in 1..=5 {
            let w = WitnessedFunction {
                g: negative_spin_count,
                alpha: negative_spin_witness,
                a: 1.0,
                b: 0.0,
                variant: Variant::Star,
            };
            let r = verify_star(&w, &ProductSpace::binary(n)).unwrap();
            assert!(r.holds, "{r:?}");
            assert_eq!(r.checked_pairs, (1u64 << n) * ((1u64 << n) - 1));
        }
    }

    #[test]
    fn zero_function_holds() {
        let w = WitnessedFunction { g: |_: &[usize]| 0.0, alpha: |x: &[usize]| vec![0.0; x.len()], a: 0.0, b: 0.0, variant: Variant::Star };
        assert!(verify_star(&w, &ProductSpace::binary(3)).unwrap().holds);
    }

    #[test]
    fn sum_with_zero_witness_fails() {
        let w = WitnessedFunction {
            g: |x: &[usize]| x.iter().sum::<usize>() as f64,
            alpha: |x: &[usize]| vec![0.0; x.len()],
            a: 1.0,
            b: 0.0,
            variant: Variant::Star,
        };
        let r = verify_star(&w, &ProductSpace::binary(3)).unwrap();
        assert!(!r.holds);
        let v = r.first_violation.unwrap();
        assert_eq!(v.condition, Condition::Lipschitz);
        assert_eq!(v.x, vec![1, 0, 0]);
        assert_eq!(v.y, Some(vec![0, 0, 0]));
        let worst = r.worst_pair.unwrap();
        assert_eq!(worst.margin, -3.0);
        assert_eq!(worst.x, vec![1, 1, 1]);
    }

    #[test]
    fn sb_examples() {
        let ones = |x: &[usize]| x.iter().sum::<usize>() as f64;
        assert!(verify_sb(ones, &ProductSpace::binary(4), 1.0, 0.0, false).unwrap().holds);
        assert!(verify_sb(|_: &[usize]| 3.5, &ProductSpace::binary(4), 0.0, 0.0, false).unwrap().holds);
        let twice = |x: &[usize]| 2.0 * x.iter().sum::<usize>() as f64;
        let r = verify_sb(twice, &ProductSpace::binary(4), 1.0, 0.0, false).unwrap();
        assert!(!r.holds);
        assert_eq!(r.first_violation.unwrap().condition, Condition::Range);
    }

    #[test]
    fn wrong_variant_rejected() {
        let w = WitnessedFunction { g: |_: &[usize]| 0.0, alpha: |x: &[usize]| vec![0.0; x.len()], a: 0.0, b: 0.0, variant: Variant::Sb };
        assert!(verify_star(&w, &ProductSpace::binary(2)).is_err());
    }

    #[test]
    fn subgraph_witness_examples() {
        let t = GraphMotif::triangle();
        let k4 = EdgeGraph::complete(4);
        let a = subgraph_witness(&k4, &t).unwrap();
        assert!(a.iter().all(|&v| v == 1.0));
        assert_eq!(a.iter().sum::<f64>(), 6.0);
        assert!(subgraph_witness(&EdgeGraph::empty(5), &t).unwrap().iter().all(|&v| v == 0.0));
        let g = EdgeGraph::from_edge_list(5, &[(0, 1), (1, 2), (0, 2)]).unwrap();
        let a = subgraph_witness(&g, &t).unwrap();
        let third = 1.0 / 3.0;
        assert_eq!(a.iter().filter(|&&v| (v - third).abs() < 1e-15).count(), 3);
        assert_eq!(a.iter().filter(|&&v| v == 0.0).count(), 7);
    }
}
