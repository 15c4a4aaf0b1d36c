//! Dobrushin interdependence matrices.
//!
//! A nonnegative zero-diagonal matrix `A` is an interdependence matrix for a
//! law on `Λ` when for every coordinate `i` and all `x, y`
//!
//! ```text
//! d_TV(μ_i(·|x_{-i}), μ_i(·|y_{-i})) ≤ Σ_{j≠i} a_ij 1[x_j ≠ y_j].
//! ```
//!
//! [`exact_matrix`] computes the entrywise minimal matrix satisfying this
//! for single-coordinate discrepancies by exhaustive enumeration; the
//! triangle inequality along coordinate-by-coordinate paths then gives the
//! inequality for all pairs. Conditioning events of probability zero are
//! skipped.
//!
//! The module also covers laws on `n`-subsets of an `N`-point universe
//! ([`SubsetLaw`]): their inhomogeneity coefficient
//! `ρ_n(μ) = n (r_{n,1} + (N - n) r_{n,2})` bounds both norms of the
//! interdependence matrix of the exchangeable coordinate representation.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::io::{Read, Write};

use crate::error::{Error, Result};
use crate::finite_dist::{tv_raw, FiniteDistribution};
use crate::space::ProductSpace;

/// Maximum number of conditional evaluations [`exact_matrix`] will perform.
pub const EXACT_MATRIX_CAPACITY: u128 = 10_000_000;

/// Largest universe [`SubsetLaw`] stores densely.
pub const MAX_UNIVERSE: usize = 20;

const NORM2_TOL: f64 = 1e-10;
const NORM2_MAX_ITERS: usize = 200_000;

/// An `n × n` interdependence matrix together with its operator norms.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InterdependenceMatrix {
    n: usize,
    entries: Vec<f64>,
    /// Maximum column sum.
    pub norm_1: f64,
    /// Maximum row sum.
    pub norm_inf: f64,
    /// Largest singular value.
    pub norm_2: f64,
}

impl InterdependenceMatrix {
    /// Validates a row-major matrix and computes its norms.
    pub fn from_entries(n: usize, entries: Vec<f64>) -> Result<Self> {
        if n == 0 {
            return Err(Error::Domain("matrix dimension must be positive".into()));
        }
        if entries.len() != n * n {
            return Err(Error::Dimension(entries.len(), n * n));
        }
        for i in 0..n {
            for j in 0..n {
                let v = entries[i * n + j];
                if !v.is_finite() || v < 0.0 {
                    return Err(Error::Domain(format!("entry ({i},{j}) = {v} is not nonnegative")));
                }
                if i == j && v != 0.0 {
                    return Err(Error::Domain(format!("diagonal entry ({i},{i}) = {v} is not zero")));
                }
            }
        }
        let norm_1 = (0..n)
            .map(|j| (0..n).map(|i| entries[i * n + j]).sum::<f64>())
            .fold(0.0, f64::max);
        let norm_inf = (0..n)
            .map(|i| entries[i * n..(i + 1) * n].iter().sum::<f64>())
            .fold(0.0, f64::max);
        let norm_2 = spectral_norm(n, &entries);
        Ok(Self { n, entries, norm_1, norm_inf, norm_2 })
    }

    pub fn zeros(n: usize) -> Result<Self> {
        Self::from_entries(n, vec![0.0; n * n])
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries[i * self.n + j]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.entries[i * self.n..(i + 1) * self.n]
    }

    pub fn entries(&self) -> &[f64] {
        &self.entries
    }

    /// `‖A‖₁ < 1` and `‖A‖_∞ ≤ 1`, the hypotheses of the concentration bounds.
    pub fn satisfies_dobrushin(&self) -> bool {
        self.norm_1 < 1.0 && self.norm_inf <= 1.0
    }

    /// Writes the matrix as CSV: a header record `n,norm_1,norm_inf,norm_2`,
    /// its values, then `n` row-major records of entries.
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut wtr = csv::WriterBuilder::new().flexible(true).from_writer(w);
        wtr.write_record(["n", "norm_1", "norm_inf", "norm_2"])?;
        wtr.write_record([
            self.n.to_string(),
            fmt_f64(self.norm_1),
            fmt_f64(self.norm_inf),
            fmt_f64(self.norm_2),
        ])?;
        for i in 0..self.n {
            wtr.write_record(self.row(i).iter().map(|v| fmt_f64(*v)))?;
        }
        wtr.flush()?;
        Ok(())
    }

    pub fn to_csv_string(&self) -> Result<String> {
        let mut buf = Vec::new();
        self.write_csv(&mut buf)?;
        Ok(String::from_utf8(buf).expect("csv output is utf-8"))
    }

    /// Reads the format produced by [`write_csv`](Self::write_csv); norms are
    /// recomputed from the entries.
    pub fn read_csv<R: Read>(r: R) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new().flexible(true).has_headers(true).from_reader(r);
        let mut records = rdr.records();
        let meta = records
            .next()
            .ok_or_else(|| Error::Domain("missing matrix metadata record".into()))??;
        let n: usize = meta
            .get(0)
            .and_then(|s| s.trim().parse().ok())
            .ok_or_else(|| Error::Domain("bad matrix dimension".into()))?;
        let mut entries = Vec::with_capacity(n * n);
        for rec in records {
            let rec = rec?;
            for field in rec.iter() {
                entries.push(
                    field
                        .trim()
                        .parse::<f64>()
                        .map_err(|e| Error::Domain(format!("bad matrix entry {field:?}: {e}")))?,
                );
            }
        }
        Self::from_entries(n, entries)
    }
}

pub(crate) fn fmt_f64(v: f64) -> String {
    format!("{v:.17e}")
}

/// Largest singular value by power iteration on `AᵀA`.
fn spectral_norm(n: usize, a: &[f64]) -> f64 {
    if a.iter().all(|&v| v == 0.0) {
        return 0.0;
    }
    let mut v = vec![1.0 / (n as f64).sqrt(); n];
    let mut w = vec![0.0; n];
    let mut u = vec![0.0; n];
    let mut lambda = 0.0;
    for _ in 0..NORM2_MAX_ITERS {
        // u = A v, w = Aᵀ u
        for i in 0..n {
            u[i] = (0..n).map(|j| a[i * n + j] * v[j]).sum();
        }
        for j in 0..n {
            w[j] = (0..n).map(|i| a[i * n + j] * u[i]).sum();
        }
        let norm = w.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm == 0.0 {
            return 0.0;
        }
        let next: f64 = v.iter().zip(&w).map(|(a, b)| a * b).sum();
        for (vi, wi) in v.iter_mut().zip(&w) {
            *vi = wi / norm;
        }
        if (next - lambda).abs() <= NORM2_TOL * next.abs() {
            lambda = next;
            break;
        }
        lambda = next;
    }
    lambda.max(0.0).sqrt()
}

/// The Curie-Weiss matrix `a_ij = β/n` off the diagonal.
pub fn curie_weiss_matrix(n: usize, beta: f64) -> Result<InterdependenceMatrix> {
    if n < 2 {
        return Err(Error::Domain("curie-weiss matrix needs n ≥ 2".into()));
    }
    if !(beta >= 0.0) {
        return Err(Error::Domain(format!("inverse temperature {beta} must be nonnegative")));
    }
    let mut entries = vec![beta / n as f64; n * n];
    for i in 0..n {
        entries[i * n + i] = 0.0;
    }
    InterdependenceMatrix::from_entries(n, entries)
}

/// A law on a finite product space described through its single-site
/// conditionals `μ_i(·|x_{-i})`.
pub trait ConditionalModel: Sync {
    fn space(&self) -> &ProductSpace;

    /// Law of coordinate `i` given the other coordinates of `x`; `x[i]` is
    /// ignored. `None` marks a conditioning event of probability zero.
    fn conditional(&self, i: usize, x: &[usize]) -> Option<FiniteDistribution>;

    /// Coordinates the conditional of `i` can depend on, if known. Returning
    /// `Some` lets [`exact_matrix`] enumerate only those coordinates.
    fn blanket(&self, _i: usize) -> Option<Vec<usize>> {
        None
    }
}

/// A model given by an explicit (unnormalized) joint table.
#[derive(Debug, Clone)]
pub struct TableModel {
    space: ProductSpace,
    weights: Vec<f64>,
    /// Set for product laws: conditionals are then the marginals themselves,
    /// so independent coordinates get exactly zero entries.
    factors: Option<Vec<FiniteDistribution>>,
}

impl TableModel {
    pub fn new(space: ProductSpace, weights: Vec<f64>) -> Result<Self> {
        if weights.len() != space.len() {
            return Err(Error::Dimension(weights.len(), space.len()));
        }
        if weights.iter().any(|w| !w.is_finite() || *w < 0.0) {
            return Err(Error::Domain("table weights must be finite and nonnegative".into()));
        }
        if weights.iter().sum::<f64>() <= 0.0 {
            return Err(Error::Degenerate("table has zero total weight".into()));
        }
        Ok(Self { space, weights, factors: None })
    }

    /// Product of independent marginals.
    pub fn independent(marginals: &[FiniteDistribution]) -> Result<Self> {
        let space = ProductSpace::new(marginals.iter().map(|m| m.support_size()).collect())?;
        let weights = space
            .states()
            .map(|x| x.iter().zip(marginals).map(|(&s, m)| m.prob(s)).product())
            .collect();
        let mut model = Self::new(space, weights)?;
        model.factors = Some(marginals.to_vec());
        Ok(model)
    }

    pub fn from_fn(space: ProductSpace, f: impl Fn(&[usize]) -> f64) -> Result<Self> {
        let weights = space.states().map(|x| f(&x)).collect();
        Self::new(space, weights)
    }

    pub fn weight(&self, x: &[usize]) -> f64 {
        self.weights[self.space.encode(x)]
    }
}

impl ConditionalModel for TableModel {
    fn space(&self) -> &ProductSpace {
        &self.space
    }

    fn conditional(&self, i: usize, x: &[usize]) -> Option<FiniteDistribution> {
        if let Some(f) = &self.factors {
            return Some(f[i].clone());
        }
        let k = self.space.sizes()[i];
        let base = self.space.encode(x) - x[i] * self.space.stride(i);
        let w: Vec<f64> = (0..k).map(|v| self.weights[base + v * self.space.stride(i)]).collect();
        FiniteDistribution::from_weights(&w).ok()
    }

    fn blanket(&self, _i: usize) -> Option<Vec<usize>> {
        self.factors.as_ref().map(|_| Vec::new())
    }
}

/// Minimal single-coordinate interdependence matrix by enumeration.
pub fn exact_matrix<M: ConditionalModel + ?Sized>(model: &M) -> Result<InterdependenceMatrix> {
    let space = model.space();
    let n = space.dim();
    if n == 0 {
        return Err(Error::Domain("model has no coordinates".into()));
    }
    let blankets: Vec<Vec<usize>> = (0..n)
        .map(|i| {
            let mut b = model
                .blanket(i)
                .unwrap_or_else(|| (0..n).filter(|&j| j != i).collect());
            b.retain(|&j| j != i && j < n);
            b.sort_unstable();
            b.dedup();
            b
        })
        .collect();
    let mut evaluations: u128 = 0;
    for b in &blankets {
        let configs = b
            .iter()
            .try_fold(1u128, |acc, &j| acc.checked_mul(space.sizes()[j] as u128))
            .unwrap_or(u128::MAX);
        evaluations = evaluations.saturating_add(configs);
    }
    if evaluations > EXACT_MATRIX_CAPACITY {
        return Err(Error::Capacity {
            what: "exact interdependence matrix",
            needed: evaluations,
            limit: EXACT_MATRIX_CAPACITY,
        });
    }
    let rows: Vec<Vec<f64>> = (0..n)
        .into_par_iter()
        .map(|i| exact_row(model, i, &blankets[i]))
        .collect();
    InterdependenceMatrix::from_entries(n, rows.concat())
}

fn exact_row<M: ConditionalModel + ?Sized>(model: &M, i: usize, blanket: &[usize]) -> Vec<f64> {
    let space = model.space();
    let n = space.dim();
    let sub = ProductSpace::new(blanket.iter().map(|&j| space.sizes()[j]).collect())
        .expect("blanket alphabets are non-empty");
    let mut x = vec![0usize; n];
    let mut digits = vec![0usize; blanket.len()];
    let cache: Vec<Option<Vec<f64>>> = (0..sub.len())
        .map(|c| {
            sub.decode_into(c, &mut digits);
            for (&j, &d) in blanket.iter().zip(&digits) {
                x[j] = d;
            }
            model.conditional(i, &x).map(|d| d.probs().to_vec())
        })
        .collect();
    let mut row = vec![0.0; n];
    for (p, &j) in blanket.iter().enumerate() {
        let k = space.sizes()[j];
        let stride = sub.stride(p);
        let mut best: f64 = 0.0;
        for c in 0..sub.len() {
            let v = (c / stride) % k;
            let Some(a) = &cache[c] else { continue };
            for w in v + 1..k {
                if let Some(b) = &cache[c + (w - v) * stride] {
                    best = best.max(tv_raw(a, b));
                }
            }
        }
        row[j] = best;
    }
    row
}

/// Outcome of checking the interdependence inequality over all pairs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DobrushinCheck {
    pub holds: bool,
    /// Largest `d_TV - Σ a_ij 1[x_j ≠ y_j]` seen (≤ 0 when the inequality holds).
    pub max_excess: f64,
    pub checked_pairs: u64,
}

/// Exhaustively checks that `matrix` is an interdependence matrix for
/// `model`, over all pairs `(x, y)` and not only single-coordinate ones.
pub fn verify_interdependence<M: ConditionalModel + ?Sized>(
    model: &M,
    matrix: &InterdependenceMatrix,
    tol: f64,
) -> Result<DobrushinCheck> {
    let space = model.space();
    let n = space.dim();
    if matrix.n() != n {
        return Err(Error::Dimension(matrix.n(), n));
    }
    let len = space.require_len("pairwise interdependence check", 100_000_000)? as u128;
    let needed = len * len * n as u128;
    if needed > 100_000_000 {
        return Err(Error::Capacity { what: "pairwise interdependence check", needed, limit: 100_000_000 });
    }
    let per_site: Vec<(f64, u64)> = (0..n)
        .into_par_iter()
        .map(|i| {
            let k = space.sizes()[i];
            let states: Vec<Vec<usize>> = space.states().filter(|x| x[i] == 0).collect();
            let conds: Vec<Option<Vec<f64>>> = states
                .iter()
                .map(|x| model.conditional(i, x).map(|d| d.probs().to_vec()))
                .collect();
            let _ = k;
            let mut excess = f64::NEG_INFINITY;
            let mut pairs = 0u64;
            for (a, (xa, ca)) in states.iter().zip(&conds).enumerate() {
                let Some(ca) = ca else { continue };
                for (xb, cb) in states.iter().zip(&conds).skip(a + 1) {
                    let Some(cb) = cb else { continue };
                    let budget: f64 = (0..n).filter(|&j| xa[j] != xb[j]).map(|j| matrix.get(i, j)).sum();
                    excess = excess.max(tv_raw(ca, cb) - budget);
                    pairs += 1;
                }
            }
            (excess, pairs)
        })
        .collect();
    let max_excess = per_site.iter().map(|p| p.0).fold(f64::NEG_INFINITY, f64::max);
    let checked_pairs = per_site.iter().map(|p| p.1).sum();
    Ok(DobrushinCheck { holds: max_excess <= tol, max_excess: max_excess.max(f64::MIN), checked_pairs })
}

/// A law on the `n`-subsets of `{0, …, N-1}`, stored densely by bitmask.
#[derive(Debug, Clone, PartialEq)]
pub struct SubsetLaw {
    universe: usize,
    size: usize,
    weights: Vec<f64>,
}

/// All `k`-subsets of an `n`-set as bitmasks, in increasing order.
pub fn masks_of_size(n: usize, k: usize) -> Vec<u32> {
    if k > n {
        return Vec::new();
    }
    if k == 0 {
        return vec![0];
    }
    let mut out = Vec::new();
    let mut m: u64 = (1u64 << k) - 1;
    let limit = 1u64 << n;
    while m < limit {
        out.push(m as u32);
        // Gosper's hack: next integer with the same popcount.
        let c = m & m.wrapping_neg();
        let r = m + c;
        m = (((r ^ m) >> 2) / c) | r;
    }
    out
}

fn mask_elements(mask: u32) -> Vec<usize> {
    (0..32).filter(|b| mask >> b & 1 == 1).collect()
}

impl SubsetLaw {
    fn check_dims(universe: usize, size: usize) -> Result<()> {
        if universe == 0 || size == 0 || size > universe {
            return Err(Error::Domain(format!("need 1 ≤ n ≤ N, got n={size}, N={universe}")));
        }
        if universe > MAX_UNIVERSE {
            return Err(Error::Capacity {
                what: "subset law universe",
                needed: universe as u128,
                limit: MAX_UNIVERSE as u128,
            });
        }
        Ok(())
    }

    /// Weights from a function of the sorted subset.
    pub fn from_fn(universe: usize, size: usize, w: impl Fn(&[usize]) -> f64) -> Result<Self> {
        Self::check_dims(universe, size)?;
        let mut weights = vec![0.0; 1 << universe];
        for m in masks_of_size(universe, size) {
            let v = w(&mask_elements(m));
            if !v.is_finite() || v < 0.0 {
                return Err(Error::Domain(format!("subset weight {v} is not nonnegative")));
            }
            weights[m as usize] = v;
        }
        if weights.iter().sum::<f64>() <= 0.0 {
            return Err(Error::Degenerate("subset law has zero total weight".into()));
        }
        Ok(Self { universe, size, weights })
    }

    /// Sampling without replacement: every subset has weight one.
    pub fn uniform(universe: usize, size: usize) -> Result<Self> {
        Self::from_fn(universe, size, |_| 1.0)
    }

    /// Weighted sampling without replacement: draw `size` indices one at a
    /// time, each proportional to `p` among those not yet drawn. The weight
    /// of a set is the probability that it is the drawn set.
    pub fn weighted_sampling(p: &FiniteDistribution, size: usize) -> Result<Self> {
        let universe = p.support_size();
        Self::check_dims(universe, size)?;
        if p.probs().iter().any(|&v| v <= 0.0) {
            return Err(Error::Domain("weighted sampling needs strictly positive weights".into()));
        }
        let full = 1usize << universe;
        let mut mass = vec![0.0; full];
        let mut prob = vec![0.0; full];
        prob[0] = 1.0;
        for m in 1..full {
            let low = m.trailing_zeros() as usize;
            mass[m] = mass[m & (m - 1)] + p.prob(low);
            if m.count_ones() as usize > size {
                continue;
            }
            let mut acc = 0.0;
            for i in mask_elements(m as u32) {
                let prev = m & !(1 << i);
                let rest = 1.0 - mass[prev];
                if rest > 0.0 {
                    acc += prob[prev] * p.prob(i) / rest;
                }
            }
            prob[m] = acc;
        }
        let weights = (0..full)
            .map(|m| if m.count_ones() as usize == size { prob[m] } else { 0.0 })
            .collect();
        Ok(Self { universe, size, weights })
    }

    pub fn universe(&self) -> usize {
        self.universe
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn weight_mask(&self, mask: u32) -> f64 {
        self.weights[mask as usize]
    }

    pub fn weight(&self, subset: &[usize]) -> f64 {
        let mut m = 0u32;
        for &s in subset {
            if s >= self.universe || m >> s & 1 == 1 {
                return 0.0;
            }
            m |= 1 << s;
        }
        self.weight_mask(m)
    }

    /// Total weight, the normalizing constant of the law.
    pub fn total(&self) -> f64 {
        self.weights.iter().sum()
    }

    /// The exchangeable coordinate vector `(X_1, …, X_n)` with
    /// `P(X = (a_1, …, a_n)) ∝ μ({a_1, …, a_n})` for distinct entries.
    pub fn coordinate_model(&self) -> SubsetCoordinateModel<'_> {
        SubsetCoordinateModel {
            law: self,
            space: ProductSpace::uniform(self.size, self.universe).expect("non-empty alphabet"),
        }
    }
}

/// See [`SubsetLaw::coordinate_model`].
#[derive(Debug, Clone)]
pub struct SubsetCoordinateModel<'a> {
    law: &'a SubsetLaw,
    space: ProductSpace,
}

impl ConditionalModel for SubsetCoordinateModel<'_> {
    fn space(&self) -> &ProductSpace {
        &self.space
    }

    fn conditional(&self, i: usize, x: &[usize]) -> Option<FiniteDistribution> {
        let mut mask = 0u32;
        for (j, &v) in x.iter().enumerate() {
            if j == i {
                continue;
            }
            if mask >> v & 1 == 1 {
                return None;
            }
            mask |= 1 << v;
        }
        let w: Vec<f64> = (0..self.law.universe)
            .map(|d| if mask >> d & 1 == 1 { 0.0 } else { self.law.weight_mask(mask | 1 << d) })
            .collect();
        FiniteDistribution::from_weights(&w).ok()
    }
}

/// `r_{n,1}`, `r_{n,2}` and `ρ_n = n (r_{n,1} + (N - n) r_{n,2})`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Inhomogeneity {
    pub r1: f64,
    pub r2: f64,
    pub rho: f64,
}

/// Computes the inhomogeneity coefficient by exhaustive enumeration of the
/// defining suprema.
pub fn inhomogeneity_exact(law: &SubsetLaw) -> Result<Inhomogeneity> {
    let big_n = law.universe;
    let n = law.size;
    let all = if big_n == 32 { u32::MAX } else { (1u32 << big_n) - 1 };

    let r1 = masks_of_size(big_n, n - 1)
        .into_par_iter()
        .map(|b| {
            let free = mask_elements(all & !b);
            let z: f64 = free.iter().map(|&e| law.weight_mask(b | 1 << e)).sum();
            if z <= 0.0 {
                return Err(Error::Degenerate(format!("conditioning set {:?} has zero weight", mask_elements(b))));
            }
            Ok(free.iter().map(|&e| law.weight_mask(b | 1 << e) / z).fold(0.0, f64::max))
        })
        .collect::<Result<Vec<f64>>>()?
        .into_iter()
        .fold(0.0, f64::max);

    let r2 = if n < 2 {
        0.0
    } else {
        masks_of_size(big_n, n - 2)
            .into_par_iter()
            .map(|b| {
                let free = mask_elements(all & !b);
                let m = free.len();
                // ratio[bi][di] = μ(B ∪ b ∪ d) / Σ_{d'} μ(B ∪ b ∪ d')
                let mut ratio = vec![vec![0.0; m]; m];
                for (bi, &bb) in free.iter().enumerate() {
                    let z: f64 = free
                        .iter()
                        .filter(|&&d| d != bb)
                        .map(|&d| law.weight_mask(b | 1 << bb | 1 << d))
                        .sum();
                    if z <= 0.0 {
                        return Err(Error::Degenerate(format!(
                            "conditioning set {:?} has zero weight",
                            mask_elements(b | 1 << bb)
                        )));
                    }
                    for (di, &d) in free.iter().enumerate() {
                        if d != bb {
                            ratio[bi][di] = law.weight_mask(b | 1 << bb | 1 << d) / z;
                        }
                    }
                }
                let mut best: f64 = 0.0;
                for di in 0..m {
                    let mut lo = f64::INFINITY;
                    let mut hi = f64::NEG_INFINITY;
                    for (bi, row) in ratio.iter().enumerate() {
                        if bi == di {
                            continue;
                        }
                        lo = lo.min(row[di]);
                        hi = hi.max(row[di]);
                    }
                    if hi >= lo {
                        best = best.max(hi - lo);
                    }
                }
                Ok(best)
            })
            .collect::<Result<Vec<f64>>>()?
            .into_iter()
            .fold(0.0, f64::max)
    };
    let rho = n as f64 * (r1 + (big_n - n) as f64 * r2);
    Ok(Inhomogeneity { r1, r2, rho })
}

/// Closed-form bound on `ρ_n` for weighted sampling without replacement:
/// `½ (r + r²) · n / (N - n)` with `r = p_max / p_min`.
pub fn weighted_swr_rho_bound(p_max: f64, p_min: f64, n: usize, universe: usize) -> Result<f64> {
    if !(p_min > 0.0 && p_min <= p_max && p_max.is_finite()) {
        return Err(Error::Domain(format!("need 0 < p_min ≤ p_max, got {p_min}, {p_max}")));
    }
    if n >= universe {
        return Err(Error::Domain(format!("need n < N, got n={n}, N={universe}")));
    }
    let r = p_max / p_min;
    Ok(0.5 * (r + r * r) * n as f64 / (universe - n) as f64)
}

/// `ρ_n` for the law, the bound on both norms of the coordinate model's
/// interdependence matrix.
pub fn swr_lemma_matrix_bound(law: &SubsetLaw) -> Result<f64> {
    Ok(inhomogeneity_exact(law)?.rho)
}

/// Both sides of the subset-law norm bound, computed exactly.
#[derive(Debug, Clone, PartialEq)]
pub struct SubsetLemmaCheck {
    pub inhomogeneity: Inhomogeneity,
    pub matrix: InterdependenceMatrix,
    pub holds: bool,
}

/// Computes `ρ_n` and the exact interdependence matrix of the coordinate
/// model and compares `‖A‖₁`, `‖A‖_∞` against `ρ_n` with slack `1e-9`.
pub fn swr_lemma_check(law: &SubsetLaw) -> Result<SubsetLemmaCheck> {
    let inhomogeneity = inhomogeneity_exact(law)?;
    let matrix = exact_matrix(&law.coordinate_model())?;
    let holds = matrix.norm_1 <= inhomogeneity.rho + 1e-9 && matrix.norm_inf <= inhomogeneity.rho + 1e-9;
    Ok(SubsetLemmaCheck { inhomogeneity, matrix, holds })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn norms_of_small_matrix() {
        let a = InterdependenceMatrix::from_entries(2, vec![0.0, 0.3, 0.1, 0.0]).unwrap();
        assert!((a.norm_1 - 0.3).abs() < 1e-15);
        assert!((a.norm_inf - 0.3).abs() < 1e-15);
        assert!((a.norm_2 - 0.3).abs() < 1e-9);
        assert!(InterdependenceMatrix::from_entries(2, vec![0.1, 0.3, 0.1, 0.0]).is_err());
        assert!(InterdependenceMatrix::from_entries(2, vec![0.0, -0.3, 0.1, 0.0]).is_err());
    }

    #[test]
    fn curie_weiss_examples() {
        let a = curie_weiss_matrix(10, 0.5).unwrap();
        assert!((a.get(0, 1) - 0.05).abs() < 1e-15);
        assert!((a.norm_1 - 0.45).abs() < 1e-12);
        assert!((a.norm_inf - 0.45).abs() < 1e-12);
        assert!((a.norm_2 - 0.45).abs() < 1e-8);
        let z = curie_weiss_matrix(5, 0.0).unwrap();
        assert!(z.entries().iter().all(|&v| v == 0.0));
        let b = curie_weiss_matrix(2, 1.0).unwrap();
        assert_eq!(b.get(0, 1), 0.5);
        assert_eq!(b.norm_1, 0.5);
        assert!(curie_weiss_matrix(1, 0.5).is_err());
    }

    #[test]
    fn curie_weiss_norms_below_beta() {
        for n in 2..40 {
            for beta in [0.1, 0.5, 0.99] {
                let a = curie_weiss_matrix(n, beta).unwrap();
                assert!(a.norm_1 < beta && a.norm_inf < beta && a.norm_2 < beta);
            }
        }
    }

    #[test]
    fn independent_coins_zero_matrix() {
        let coin = FiniteDistribution::uniform(2).unwrap();
        let m = TableModel::independent(&[coin.clone(), coin]).unwrap();
        let a = exact_matrix(&m).unwrap();
        assert!(a.entries().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn deterministic_copy_has_unit_entry() {
        // X_2 = X_1, X_1 a fair coin
        let space = ProductSpace::binary(2);
        let m = TableModel::from_fn(space, |x| if x[0] == x[1] { 0.5 } else { 0.0 }).unwrap();
        let a = exact_matrix(&m).unwrap();
        assert_eq!(a.get(1, 0), 1.0);
        assert_eq!(a.get(0, 1), 1.0);
    }

    #[test]
    fn gosper_enumeration() {
        assert_eq!(masks_of_size(4, 2), vec![0b0011, 0b0101, 0b0110, 0b1001, 0b1010, 0b1100]);
        assert_eq!(masks_of_size(5, 0), vec![0]);
        assert_eq!(masks_of_size(20, 10).len(), 184_756);
    }

    #[test]
    fn uniform_inhomogeneity() {
        let h = inhomogeneity_exact(&SubsetLaw::uniform(10, 4).unwrap()).unwrap();
        assert!((h.r1 - 1.0 / 7.0).abs() < 1e-15);
        assert_eq!(h.r2, 0.0);
        assert!((h.rho - 4.0 / 7.0).abs() < 1e-15);
        for big_n in 1..9 {
            let h = inhomogeneity_exact(&SubsetLaw::uniform(big_n, 1).unwrap()).unwrap();
            assert!((h.rho - 1.0 / big_n as f64).abs() < 1e-15);
        }
    }

    #[test]
    fn equal_weights_match_uniform() {
        let w = SubsetLaw::from_fn(9, 3, |_| 0.37).unwrap();
        let u = SubsetLaw::uniform(9, 3).unwrap();
        let a = inhomogeneity_exact(&w).unwrap();
        let b = inhomogeneity_exact(&u).unwrap();
        assert!((a.rho - b.rho).abs() < 1e-14);
        assert!(a.r2 < 1e-15);
    }

    #[test]
    fn degenerate_law_rejected() {
        // only {0, 1} has weight; B = {2} has no completion
        let law = SubsetLaw::from_fn(4, 2, |s| if s == [0, 1] { 1.0 } else { 0.0 }).unwrap();
        assert!(matches!(inhomogeneity_exact(&law), Err(Error::Degenerate(_))));
    }

    #[test]
    fn weighted_bound_examples() {
        assert!((weighted_swr_rho_bound(0.1, 0.1, 4, 10).unwrap() - 4.0 / 6.0).abs() < 1e-15);
        assert!((weighted_swr_rho_bound(0.2, 0.1, 2, 10).unwrap() - 0.75).abs() < 1e-15);
        assert_eq!(weighted_swr_rho_bound(0.2, 0.1, 0, 10).unwrap(), 0.0);
        assert!(weighted_swr_rho_bound(0.2, 0.1, 10, 10).is_err());
        assert!(weighted_swr_rho_bound(0.1, 0.2, 1, 10).is_err());
    }

    #[test]
    fn weighted_sampling_law_is_normalized() {
        let p = FiniteDistribution::new(vec![0.5, 0.25, 0.25]).unwrap();
        let law = SubsetLaw::weighted_sampling(&p, 2).unwrap();
        assert!((law.total() - 1.0).abs() < 1e-15);
        // {0,1}: (1/2)(1/2) + (1/4)(2/3)
        assert!((law.weight(&[0, 1]) - 5.0 / 12.0).abs() < 1e-15);
    }

    #[test]
    fn lemma_bound_uniform_six_choose_two() {
        let law = SubsetLaw::uniform(6, 2).unwrap();
        let check = swr_lemma_check(&law).unwrap();
        assert!((check.inhomogeneity.rho - 0.4).abs() < 1e-15);
        assert!(check.holds);
        let single = swr_lemma_check(&SubsetLaw::uniform(4, 1).unwrap()).unwrap();
        assert_eq!(single.matrix.norm_1, 0.0);
        assert_eq!(single.matrix.norm_inf, 0.0);
    }

    #[test]
    fn lemma_bound_weighted_ratio_two() {
        let p = FiniteDistribution::from_weights(&[2.0, 1.0, 1.0, 2.0, 1.0, 1.0]).unwrap();
        let law = SubsetLaw::weighted_sampling(&p, 2).unwrap();
        let check = swr_lemma_check(&law).unwrap();
        assert!(check.holds, "{check:?}");
    }

    #[test]
    fn capacity_guard() {
        let law = SubsetLaw::uniform(20, 10).unwrap();
        assert!(matches!(exact_matrix(&law.coordinate_model()), Err(Error::Capacity { .. })));
    }

    #[test]
    fn csv_roundtrip() {
        let a = curie_weiss_matrix(4, 0.7).unwrap();
        let s = a.to_csv_string().unwrap();
        assert!(s.starts_with("n,norm_1,norm_inf,norm_2\n4,"));
        let b = InterdependenceMatrix::read_csv(s.as_bytes()).unwrap();
        assert_eq!(a.entries(), b.entries());
        assert!((a.norm_2 - b.norm_2).abs() < 1e-12);
    }
}
