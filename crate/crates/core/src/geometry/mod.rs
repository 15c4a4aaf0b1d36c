//! Point sets in the unit square, tours under possibly asymmetric costs,
//! and minimum spanning trees.

pub mod hilbert;
pub mod mst;
pub mod tsp;

use rand::Rng;
use serde::{Deserialize, Serialize};
use std::io::{Read, Write};

use crate::dobrushin::fmt_f64;
use crate::error::{domain, Error, Result};

pub use hilbert::{space_filling_order, space_filling_tour};
pub use mst::{mst, mst_invariant_check, mst_witness_alpha, steiner_upper, MstInvariantReport, SpanningTree};
pub use tsp::{
    exact_tsp, heuristic_tsp, tsp_lipschitz_slack, tsp_witness_alpha, tsp_witness_check, witness_tour, TspWitnessReport,
    EXACT_TSP_LIMIT, EXACT_WITNESS_LIMIT,
};

pub type Point = [f64; 2];

pub fn euclid(a: Point, b: Point) -> f64 {
    (a[0] - b[0]).hypot(a[1] - b[1])
}

pub fn euclid_sq(a: Point, b: Point) -> f64 {
    let (dx, dy) = (a[0] - b[0], a[1] - b[1]);
    dx * dx + dy * dy
}

/// Points in `[0,1]²`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointSet {
    points: Vec<Point>,
}

impl PointSet {
    pub fn new(points: Vec<Point>) -> Result<Self> {
        for (i, p) in points.iter().enumerate() {
            if !(0.0..=1.0).contains(&p[0]) || !(0.0..=1.0).contains(&p[1]) {
                return domain(format!("point {i} = ({}, {}) lies outside the unit square", p[0], p[1]));
            }
        }
        Ok(Self { points })
    }

    /// `n` independent uniform points.
    pub fn random<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Self {
        Self { points: (0..n).map(|_| [rng.random::<f64>(), rng.random::<f64>()]).collect() }
    }

    /// A `cols × rows` lattice spanning the unit square, row by row.
    pub fn grid(cols: usize, rows: usize) -> Result<Self> {
        if cols < 2 || rows < 2 {
            return domain("grid needs at least two columns and two rows");
        }
        let mut points = Vec::with_capacity(cols * rows);
        for r in 0..rows {
            for c in 0..cols {
                points.push([c as f64 / (cols - 1) as f64, r as f64 / (rows - 1) as f64]);
            }
        }
        Ok(Self { points })
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn get(&self, i: usize) -> Point {
        self.points[i]
    }

    /// The points at the given indices, in that order.
    pub fn select(&self, indices: &[usize]) -> Self {
        Self { points: indices.iter().map(|&i| self.points[i]).collect() }
    }

    /// Reads `x,y` records; a leading `x,y` header is skipped.
    pub fn read_csv<R: Read>(r: R) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new().has_headers(false).trim(csv::Trim::All).from_reader(r);
        let mut points = Vec::new();
        for (k, rec) in rdr.records().enumerate() {
            let rec = rec?;
            if rec.len() != 2 {
                return domain(format!("record {k}: expected 2 fields, found {}", rec.len()));
            }
            let parsed = (rec[0].parse::<f64>(), rec[1].parse::<f64>());
            match parsed {
                (Ok(x), Ok(y)) => points.push([x, y]),
                _ if k == 0 => continue,
                _ => return domain(format!("record {k}: unparsable coordinates")),
            }
        }
        Self::new(points)
    }

    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut wtr = csv::Writer::from_writer(w);
        wtr.write_record(["x", "y"])?;
        for p in &self.points {
            wtr.write_record([fmt_f64(p[0]), fmt_f64(p[1])])?;
        }
        wtr.flush()?;
        Ok(())
    }

    /// Fails on repeated points.
    pub fn check_distinct(&self) -> Result<()> {
        let mut sorted: Vec<(Point, usize)> = self.points.iter().copied().zip(0..).collect();
        sorted.sort_by(|a, b| a.0[0].total_cmp(&b.0[0]).then(a.0[1].total_cmp(&b.0[1])));
        for w in sorted.windows(2) {
            if w[0].0 == w[1].0 {
                return domain(format!("points {} and {} coincide", w[0].1, w[1].1));
            }
        }
        Ok(())
    }
}

/// A travel cost with `|x - y| ≤ L(x, y) ≤ C |x - y|`; it need not be symmetric.
pub trait CostFunction: Sync {
    fn cost(&self, a: Point, b: Point) -> f64;
    /// The constant `C`.
    fn ratio(&self) -> f64;
    fn is_symmetric(&self) -> bool;
}

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Euclidean;

impl CostFunction for Euclidean {
    fn cost(&self, a: Point, b: Point) -> f64 {
        euclid(a, b)
    }
    fn ratio(&self) -> f64 {
        1.0
    }
    fn is_symmetric(&self) -> bool {
        true
    }
}

/// `C |x - y|`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScaledEuclidean {
    c: f64,
}

impl ScaledEuclidean {
    pub fn new(c: f64) -> Result<Self> {
        if !(c >= 1.0 && c.is_finite()) {
            return domain(format!("cost ratio must be at least 1, got {c}"));
        }
        Ok(Self { c })
    }
}

impl CostFunction for ScaledEuclidean {
    fn cost(&self, a: Point, b: Point) -> f64 {
        self.c * euclid(a, b)
    }
    fn ratio(&self) -> f64 {
        self.c
    }
    fn is_symmetric(&self) -> bool {
        self.c == 1.0
    }
}

/// Uphill travel is slower: with terrain height
/// `z(x) = sin(πx₁) sin(πx₂) ∈ [0, 1]`,
/// `L(x, y) = |x - y| (1 + (C - 1) max(0, z(y) - z(x)))`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ElevationCost {
    c: f64,
}

impl ElevationCost {
    pub fn new(c: f64) -> Result<Self> {
        if !(c >= 1.0 && c.is_finite()) {
            return domain(format!("cost ratio must be at least 1, got {c}"));
        }
        Ok(Self { c })
    }

    pub fn height(p: Point) -> f64 {
        (std::f64::consts::PI * p[0]).sin() * (std::f64::consts::PI * p[1]).sin()
    }
}

impl CostFunction for ElevationCost {
    fn cost(&self, a: Point, b: Point) -> f64 {
        let climb = (Self::height(b) - Self::height(a)).clamp(0.0, 1.0);
        euclid(a, b) * (1.0 + (self.c - 1.0) * climb)
    }
    fn ratio(&self) -> f64 {
        self.c
    }
    fn is_symmetric(&self) -> bool {
        self.c == 1.0
    }
}

/// Named cost functions for configuration files and the command line.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CostSpec {
    Euclidean,
    Scaled { c: f64 },
    Elevation { c: f64 },
}

impl CostSpec {
    pub fn build(&self) -> Result<Box<dyn CostFunction>> {
        Ok(match *self {
            CostSpec::Euclidean => Box::new(Euclidean),
            CostSpec::Scaled { c } => Box::new(ScaledEuclidean::new(c)?),
            CostSpec::Elevation { c } => Box::new(ElevationCost::new(c)?),
        })
    }
}

/// Dense row-major matrix `L(pᵢ, pⱼ)`.
pub fn cost_matrix<L: CostFunction + ?Sized>(ps: &PointSet, l: &L) -> Vec<f64> {
    let n = ps.len();
    let mut m = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..n {
            if i != j {
                m[i * n + j] = l.cost(ps.points[i], ps.points[j]);
            }
        }
    }
    m
}

/// Largest violation of `|x - y| ≤ L(x, y) ≤ C |x - y|` over `samples`
/// random pairs (zero when the cost is admissible).
pub fn cost_sandwich_violation<L: CostFunction + ?Sized, R: Rng + ?Sized>(l: &L, samples: usize, rng: &mut R) -> f64 {
    let mut worst: f64 = 0.0;
    for _ in 0..samples {
        let a = [rng.random::<f64>(), rng.random::<f64>()];
        let b = [rng.random::<f64>(), rng.random::<f64>()];
        let (d, c) = (euclid(a, b), l.cost(a, b));
        worst = worst.max(d - c).max(c - l.ratio() * d);
    }
    worst
}

/// A closed tour through every point of a set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Tour {
    pub order: Vec<usize>,
    /// `Σ L(consecutive)` including the closing edge.
    pub cost: f64,
    /// `Σ |consecutive|²` including the closing edge.
    pub sum_sq_euclidean: f64,
}

impl Tour {
    pub fn new<L: CostFunction + ?Sized>(ps: &PointSet, order: Vec<usize>, l: &L) -> Result<Self> {
        let n = ps.len();
        let mut seen = vec![false; n];
        if order.len() != n {
            return Err(Error::Dimension(order.len(), n));
        }
        for &i in &order {
            if i >= n || std::mem::replace(&mut seen[i], true) {
                return domain("tour order is not a permutation");
            }
        }
        let mut cost = 0.0;
        let mut sq = 0.0;
        for k in 0..n {
            let (a, b) = (ps.get(order[k]), ps.get(order[(k + 1) % n]));
            cost += l.cost(a, b);
            sq += euclid_sq(a, b);
        }
        Ok(Self { order, cost, sum_sq_euclidean: sq })
    }

    pub fn write_csv<W: Write>(&self, ps: &PointSet, w: W) -> Result<()> {
        let mut wtr = csv::Writer::from_writer(w);
        wtr.write_record(["position", "index", "x", "y"])?;
        for (k, &i) in self.order.iter().enumerate() {
            let p = ps.get(i);
            wtr.write_record([k.to_string(), i.to_string(), fmt_f64(p[0]), fmt_f64(p[1])])?;
        }
        wtr.flush()?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::stream_rng;

    #[test]
    fn costs_are_sandwiched() {
        let mut rng = stream_rng(11, 0);
        for c in [1.0, 1.5, 2.0] {
            assert_eq!(cost_sandwich_violation(&ScaledEuclidean::new(c).unwrap(), 10_000, &mut rng), 0.0);
            assert!(cost_sandwich_violation(&ElevationCost::new(c).unwrap(), 10_000, &mut rng) <= 1e-15);
        }
        assert!(ScaledEuclidean::new(0.5).is_err());
    }

    #[test]
    fn elevation_cost_is_asymmetric() {
        let l = ElevationCost::new(2.0).unwrap();
        let (low, high) = ([0.05, 0.05], [0.5, 0.5]);
        assert!(l.cost(low, high) > l.cost(high, low));
        assert!(!l.is_symmetric());
    }

    #[test]
    fn csv_roundtrip_and_header() {
        let ps = PointSet::new(vec![[0.0, 0.5], [1.0, 0.25]]).unwrap();
        let mut buf = Vec::new();
        ps.write_csv(&mut buf).unwrap();
        assert_eq!(PointSet::read_csv(buf.as_slice()).unwrap(), ps);
        assert_eq!(PointSet::read_csv("0.1,0.2\n0.3,0.4\n".as_bytes()).unwrap().len(), 2);
        assert!(PointSet::read_csv("0.1,2.0\n".as_bytes()).is_err());
    }

    #[test]
    fn duplicates_detected() {
        let ps = PointSet::new(vec![[0.1, 0.1], [0.2, 0.2], [0.1, 0.1]]).unwrap();
        assert!(ps.check_distinct().is_err());
        assert!(PointSet::grid(8, 5).unwrap().check_distinct().is_ok());
    }

    #[test]
    fn tour_bookkeeping() {
        let ps = PointSet::new(vec![[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]]).unwrap();
        let t = Tour::new(&ps, vec![0, 1, 2, 3], &Euclidean).unwrap();
        assert_eq!(t.cost, 4.0);
        assert_eq!(t.sum_sq_euclidean, 4.0);
        assert!(Tour::new(&ps, vec![0, 1, 1, 3], &Euclidean).is_err());
    }
}
