//! Sampling without replacement, uniform and weighted.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};
use crate::finite_dist::FiniteDistribution;

/// An ordered sample of distinct indices from `0..universe`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct IndexSample {
    pub universe: usize,
    pub indices: Vec<usize>,
}

impl IndexSample {
    /// Bitmask of the sampled set (`universe ≤ 32`).
    pub fn mask(&self) -> u32 {
        self.indices.iter().fold(0, |m, &i| m | 1 << i)
    }

    pub fn sorted(&self) -> Vec<usize> {
        let mut v = self.indices.clone();
        v.sort_unstable();
        v
    }
}

fn check(p: &FiniteDistribution, n: usize) -> Result<()> {
    if n > p.support_size() {
        return domain(format!("cannot draw {n} distinct indices from {}", p.support_size()));
    }
    if p.probs().iter().any(|&v| v <= 0.0) {
        return domain("weighted sampling without replacement needs strictly positive weights");
    }
    Ok(())
}

/// Draws `n` indices one at a time, each proportional to `p` among the
/// indices not yet drawn.
pub fn weighted_swr_sample<R: Rng + ?Sized>(p: &FiniteDistribution, n: usize, rng: &mut R) -> Result<IndexSample> {
    check(p, n)?;
    let mut w = p.probs().to_vec();
    let mut indices = Vec::with_capacity(n);
    for _ in 0..n {
        let total: f64 = w.iter().sum();
        if total <= 0.0 {
            return domain("remaining weights vanished");
        }
        let u = rng.random::<f64>() * total;
        let mut acc = 0.0;
        let mut pick = None;
        for (i, &wi) in w.iter().enumerate() {
            if wi > 0.0 {
                acc += wi;
                pick = Some(i);
                if u < acc {
                    break;
                }
            }
        }
        let i = pick.expect("positive remaining weight");
        w[i] = 0.0;
        indices.push(i);
    }
    Ok(IndexSample { universe: p.support_size(), indices })
}

/// The same law through exponential clocks: clock `i` rings at an
/// `Exp(p(i))` time and the first `n` clocks to ring form the sample.
pub fn weighted_swr_sample_clocks<R: Rng + ?Sized>(
    p: &FiniteDistribution,
    n: usize,
    rng: &mut R,
) -> Result<IndexSample> {
    check(p, n)?;
    let mut times: Vec<(f64, usize)> = p
        .probs()
        .iter()
        .enumerate()
        .map(|(i, &pi)| {
            let u: f64 = rng.random();
            (-(1.0 - u).ln() / pi, i)
        })
        .collect();
    times.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    Ok(IndexSample { universe: p.support_size(), indices: times[..n].iter().map(|t| t.1).collect() })
}

/// Uniform sampling without replacement by a partial Fisher-Yates shuffle.
pub fn uniform_swr_sample<R: Rng + ?Sized>(universe: usize, n: usize, rng: &mut R) -> Result<IndexSample> {
    if n > universe {
        return domain(format!("cannot draw {n} distinct indices from {universe}"));
    }
    let mut pool: Vec<usize> = (0..universe).collect();
    for k in 0..n {
        let j = rng.random_range(k..universe);
        pool.swap(k, j);
    }
    pool.truncate(n);
    Ok(IndexSample { universe, indices: pool })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::stream_rng;

    #[test]
    fn samples_are_distinct() {
        let p = FiniteDistribution::from_weights(&[1.0, 2.0, 3.0, 4.0, 5.0]).unwrap();
        let mut rng = stream_rng(3, 0);
        for _ in 0..200 {
            for s in [
                weighted_swr_sample(&p, 4, &mut rng).unwrap(),
                weighted_swr_sample_clocks(&p, 4, &mut rng).unwrap(),
                uniform_swr_sample(5, 4, &mut rng).unwrap(),
            ] {
                let mut v = s.sorted();
                v.dedup();
                assert_eq!(v.len(), 4);
            }
        }
    }

    #[test]
    fn full_draw_is_permutation() {
        let p = FiniteDistribution::uniform(6).unwrap();
        let mut rng = stream_rng(4, 0);
        let s = weighted_swr_sample(&p, 6, &mut rng).unwrap();
        assert_eq!(s.sorted(), (0..6).collect::<Vec<_>>());
    }

    #[test]
    fn rejects_bad_input() {
        let p = FiniteDistribution::new(vec![0.5, 0.5, 0.0]).unwrap();
        let mut rng = stream_rng(5, 0);
        assert!(weighted_swr_sample(&p, 2, &mut rng).is_err());
        let q = FiniteDistribution::uniform(3).unwrap();
        assert!(weighted_swr_sample(&q, 4, &mut rng).is_err());
    }
}
