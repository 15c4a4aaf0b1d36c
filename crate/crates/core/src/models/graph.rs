//! Simple graphs as edge-indicator vectors and motif copy counting.
//!
//! Edge slots follow upper-triangle order: `(0,1), (0,2), …, (0,n-1), (1,2), …`.

use serde::{Deserialize, Serialize};

use crate::dobrushin::masks_of_size;
use crate::error::{domain, Error, Result};

/// Number of edge slots of a simple graph on `n` vertices.
pub fn edge_slots(n: usize) -> usize {
    n * n.saturating_sub(1) / 2
}

/// Slot of the edge `{i, j}`, `i ≠ j`.
pub fn edge_index(n: usize, i: usize, j: usize) -> usize {
    let (i, j) = if i < j { (i, j) } else { (j, i) };
    debug_assert!(j < n && i != j);
    i * (2 * n - i - 1) / 2 + (j - i - 1)
}

/// Endpoints of every slot, in slot order.
pub fn edge_endpoints(n: usize) -> Vec<(usize, usize)> {
    let mut out = Vec::with_capacity(edge_slots(n));
    for i in 0..n {
        for j in i + 1..n {
            out.push((i, j));
        }
    }
    out
}

/// A simple graph on `n_vertices` vertices.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct EdgeGraph {
    n_vertices: usize,
    edges: Vec<u8>,
}

impl EdgeGraph {
    pub fn empty(n_vertices: usize) -> Self {
        Self { n_vertices, edges: vec![0; edge_slots(n_vertices)] }
    }

    pub fn complete(n_vertices: usize) -> Self {
        Self { n_vertices, edges: vec![1; edge_slots(n_vertices)] }
    }

    /// Builds a graph from an indicator vector in slot order.
    pub fn from_indicators(n_vertices: usize, edges: &[usize]) -> Result<Self> {
        if edges.len() != edge_slots(n_vertices) {
            return Err(Error::Dimension(edges.len(), edge_slots(n_vertices)));
        }
        if edges.iter().any(|&e| e > 1) {
            return domain("edge indicators must be 0 or 1");
        }
        Ok(Self { n_vertices, edges: edges.iter().map(|&e| e as u8).collect() })
    }

    pub fn from_edge_list(n_vertices: usize, list: &[(usize, usize)]) -> Result<Self> {
        let mut g = Self::empty(n_vertices);
        for &(i, j) in list {
            if i == j || i >= n_vertices || j >= n_vertices {
                return domain(format!("invalid edge ({i},{j}) on {n_vertices} vertices"));
            }
            g.set(i, j, true);
        }
        Ok(g)
    }

    /// The cycle `0 - 1 - … - (n-1) - 0`.
    pub fn cycle(n_vertices: usize) -> Self {
        let mut g = Self::empty(n_vertices);
        for i in 0..n_vertices {
            g.set(i, (i + 1) % n_vertices, true);
        }
        g
    }

    pub fn n_vertices(&self) -> usize {
        self.n_vertices
    }

    pub fn indicators(&self) -> &[u8] {
        &self.edges
    }

    pub fn has_edge(&self, i: usize, j: usize) -> bool {
        i != j && self.edges[edge_index(self.n_vertices, i, j)] == 1
    }

    pub fn set(&mut self, i: usize, j: usize, present: bool) {
        let k = edge_index(self.n_vertices, i, j);
        self.edges[k] = present as u8;
    }

    pub fn edge_count(&self) -> usize {
        self.edges.iter().map(|&e| e as usize).sum()
    }

    pub fn common_neighbours(&self, i: usize, j: usize) -> usize {
        (0..self.n_vertices)
            .filter(|&k| k != i && k != j && self.has_edge(i, k) && self.has_edge(j, k))
            .count()
    }

    pub fn triangle_count(&self) -> usize {
        let n = self.n_vertices;
        let mut count = 0;
        for i in 0..n {
            for j in i + 1..n {
                if !self.has_edge(i, j) {
                    continue;
                }
                for k in j + 1..n {
                    if self.has_edge(i, k) && self.has_edge(j, k) {
                        count += 1;
                    }
                }
            }
        }
        count
    }
}

/// A small pattern graph.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphMotif {
    vertices: usize,
    edges: Vec<(usize, usize)>,
}

/// Largest motif [`subgraph_count`] enumerates.
pub const MAX_MOTIF_VERTICES: usize = 5;

impl GraphMotif {
    pub fn new(vertices: usize, edges: Vec<(usize, usize)>) -> Result<Self> {
        if vertices < 2 || edges.is_empty() {
            return domain("motif needs at least two vertices and one edge");
        }
        if vertices > MAX_MOTIF_VERTICES {
            return Err(Error::Capacity {
                what: "motif vertices",
                needed: vertices as u128,
                limit: MAX_MOTIF_VERTICES as u128,
            });
        }
        let mut seen = std::collections::BTreeSet::new();
        for &(u, v) in &edges {
            if u == v || u >= vertices || v >= vertices || !seen.insert((u.min(v), u.max(v))) {
                return domain(format!("invalid or repeated motif edge ({u},{v})"));
            }
        }
        Ok(Self { vertices, edges })
    }

    pub fn edge() -> Self {
        Self::new(2, vec![(0, 1)]).expect("valid motif")
    }

    pub fn triangle() -> Self {
        Self::new(3, vec![(0, 1), (1, 2), (0, 2)]).expect("valid motif")
    }

    /// Path with `k` edges.
    pub fn path(k: usize) -> Result<Self> {
        Self::new(k + 1, (0..k).map(|i| (i, i + 1)).collect())
    }

    pub fn cycle(k: usize) -> Result<Self> {
        Self::new(k, (0..k).map(|i| (i, (i + 1) % k)).collect())
    }

    pub fn vertices(&self) -> usize {
        self.vertices
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }
}

/// Next permutation in lexicographic order; false after the last one.
fn next_permutation(p: &mut [usize]) -> bool {
    let Some(i) = (1..p.len()).rev().find(|&i| p[i - 1] < p[i]) else {
        return false;
    };
    let j = (i..p.len()).rev().find(|&j| p[j] > p[i - 1]).expect("pivot has a successor");
    p.swap(i - 1, j);
    p[i..].reverse();
    true
}

/// One counted copy: a vertex subset and the edge slots of its canonical
/// embedding (the lexicographically first bijection that maps every motif
/// edge onto a present edge).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MotifCopy {
    pub vertices: Vec<usize>,
    pub edge_slots: Vec<usize>,
}

/// All vertex subsets of size `n_S` whose induced subgraph contains the motif.
pub fn motif_copies(g: &EdgeGraph, motif: &GraphMotif) -> Result<Vec<MotifCopy>> {
    let n = g.n_vertices;
    if motif.vertices > n {
        return domain(format!("motif with {} vertices exceeds host with {n}", motif.vertices));
    }
    if n > 32 {
        return Err(Error::Capacity { what: "host vertices", needed: n as u128, limit: 32 });
    }
    let k = motif.vertices;
    let mut out = Vec::new();
    for mask in masks_of_size(n, k) {
        let subset: Vec<usize> = (0..n).filter(|b| mask >> b & 1 == 1).collect();
        let mut perm: Vec<usize> = (0..k).collect();
        loop {
            let ok = motif.edges.iter().all(|&(u, v)| g.has_edge(subset[perm[u]], subset[perm[v]]));
            if ok {
                let slots = motif
                    .edges
                    .iter()
                    .map(|&(u, v)| edge_index(n, subset[perm[u]], subset[perm[v]]))
                    .collect();
                out.push(MotifCopy { vertices: subset.clone(), edge_slots: slots });
                break;
            }
            if !next_permutation(&mut perm) {
                break;
            }
        }
    }
    Ok(out)
}

/// `N_S(x)`: the number of vertex subsets of size `n_S` whose induced
/// subgraph contains a copy of the motif.
pub fn subgraph_count(g: &EdgeGraph, motif: &GraphMotif) -> Result<u64> {
    Ok(motif_copies(g, motif)?.len() as u64)
}
