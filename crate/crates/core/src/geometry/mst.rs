//! Euclidean minimum spanning trees and the edge invariants used by the
//! Steiner tree bound.

use serde::Serialize;
use std::io::Write;

use super::{euclid, PointSet};
use crate::bounds::{MST_MAX_DEGREE, MST_SQUARE_SUM, MST_WITNESS_BOUND};
use crate::dobrushin::fmt_f64;
use crate::error::{domain, Result};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpanningTree {
    /// `(u, v)` with `u < v`, in the order Prim's algorithm added them.
    pub edges: Vec<(usize, usize)>,
    pub edge_lengths: Vec<f64>,
    pub total_length: f64,
    pub degrees: Vec<usize>,
    pub max_degree: usize,
}

impl SpanningTree {
    pub fn vertex_count(&self) -> usize {
        self.degrees.len()
    }

    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut wtr = csv::Writer::from_writer(w);
        wtr.write_record(["u", "v", "length"])?;
        for (&(u, v), &len) in self.edges.iter().zip(&self.edge_lengths) {
            wtr.write_record([u.to_string(), v.to_string(), fmt_f64(len)])?;
        }
        wtr.flush()?;
        Ok(())
    }
}

fn edge_key(a: usize, b: usize) -> (usize, usize) {
    (a.min(b), a.max(b))
}

/// Dense Prim from vertex 0. Equal lengths are resolved by the smaller
/// `(min, max)` endpoint pair.
pub fn mst(ps: &PointSet) -> Result<SpanningTree> {
    let n = ps.len();
    if n < 2 {
        return domain("a spanning tree needs at least two points");
    }
    ps.check_distinct()?;
    let pts = ps.points();
    let mut in_tree = vec![false; n];
    let mut key = vec![f64::INFINITY; n];
    let mut link = vec![usize::MAX; n];
    in_tree[0] = true;
    for v in 1..n {
        key[v] = euclid(pts[0], pts[v]);
        link[v] = 0;
    }
    let mut edges = Vec::with_capacity(n - 1);
    let mut edge_lengths = Vec::with_capacity(n - 1);
    let mut degrees = vec![0; n];
    for _ in 1..n {
        let v = (0..n)
            .filter(|&v| !in_tree[v])
            .min_by(|&a, &b| key[a].total_cmp(&key[b]).then(edge_key(a, link[a]).cmp(&edge_key(b, link[b]))))
            .expect("a vertex remains outside the tree");
        in_tree[v] = true;
        edges.push(edge_key(v, link[v]));
        edge_lengths.push(key[v]);
        degrees[v] += 1;
        degrees[link[v]] += 1;
        for w in 0..n {
            if in_tree[w] {
                continue;
            }
            let d = euclid(pts[v], pts[w]);
            if d < key[w] || (d == key[w] && edge_key(v, w) < edge_key(link[w], w)) {
                key[w] = d;
                link[w] = v;
            }
        }
    }
    let total_length = edge_lengths.iter().sum();
    let max_degree = degrees.iter().copied().max().unwrap_or(0);
    Ok(SpanningTree { edges, edge_lengths, total_length, degrees, max_degree })
}

/// `αᵢ = 2 Σ (lengths of tree edges at i)`.
pub fn mst_witness_alpha(tree: &SpanningTree) -> Vec<f64> {
    let mut alpha = vec![0.0; tree.vertex_count()];
    for (&(u, v), &len) in tree.edges.iter().zip(&tree.edge_lengths) {
        alpha[u] += 2.0 * len;
        alpha[v] += 2.0 * len;
    }
    alpha
}

#[derive(Debug, Clone, Serialize)]
pub struct MstInvariantReport {
    pub vertices: usize,
    pub sum_sq_edges: f64,
    pub max_degree: usize,
    pub sum_sq_alpha: f64,
    pub square_sum_ok: bool,
    pub degree_ok: bool,
    pub alpha_ok: bool,
}

impl MstInvariantReport {
    pub fn holds(&self) -> bool {
        self.square_sum_ok && self.degree_ok && self.alpha_ok
    }
}

/// Checks `Σe² ≤ 410`, degree `≤ 6` and `Σαᵢ² ≤ 19680`.
pub fn mst_invariant_check(tree: &SpanningTree) -> MstInvariantReport {
    let sum_sq_edges: f64 = tree.edge_lengths.iter().map(|e| e * e).sum();
    let sum_sq_alpha: f64 = mst_witness_alpha(tree).iter().map(|a| a * a).sum();
    MstInvariantReport {
        vertices: tree.vertex_count(),
        sum_sq_edges,
        max_degree: tree.max_degree,
        sum_sq_alpha,
        square_sum_ok: sum_sq_edges <= MST_SQUARE_SUM,
        degree_ok: tree.max_degree <= MST_MAX_DEGREE,
        alpha_ok: sum_sq_alpha <= MST_WITNESS_BOUND,
    }
}

/// MST length, an upper bound on the Steiner tree length.
pub fn steiner_upper(ps: &PointSet) -> Result<f64> {
    Ok(mst(ps)?.total_length)
}
