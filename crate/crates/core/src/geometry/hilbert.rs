//! Ordering points along a Hilbert space-filling curve.

use super::{Euclidean, PointSet, Tour};
use crate::error::{domain, Result};

/// Position of cell `(x, y)` along the Hilbert curve on a `side × side`
/// grid, `side` a power of two.
pub fn hilbert_index(side: u64, mut x: u64, mut y: u64) -> u64 {
    let mut d = 0;
    let mut s = side / 2;
    while s > 0 {
        let rx = (x & s > 0) as u64;
        let ry = (y & s > 0) as u64;
        d += s * s * ((3 * rx) ^ ry);
        if ry == 0 {
            if rx == 1 {
                x = side - 1 - x;
                y = side - 1 - y;
            }
            std::mem::swap(&mut x, &mut y);
        }
        s /= 2;
    }
    d
}

/// Curve depth `⌈log₄ n⌉ + 4`, capped so indices fit in 64 bits.
pub fn curve_depth(n: usize) -> u32 {
    let mut levels = 0u32;
    while 4usize.saturating_pow(levels) < n {
        levels += 1;
    }
    (levels + 4).min(31)
}

/// Point indices sorted by Hilbert index, ties by point index.
pub fn space_filling_order(ps: &PointSet) -> Vec<usize> {
    let side = 1u64 << curve_depth(ps.len());
    let cell = |v: f64| ((v * side as f64) as u64).min(side - 1);
    let mut keyed: Vec<(u64, usize)> = ps
        .points()
        .iter()
        .enumerate()
        .map(|(i, p)| (hilbert_index(side, cell(p[0]), cell(p[1])), i))
        .collect();
    keyed.sort_unstable();
    keyed.into_iter().map(|(_, i)| i).collect()
}

/// The tour visiting points in Hilbert order, with Euclidean cost.
pub fn space_filling_tour(ps: &PointSet) -> Result<Tour> {
    if ps.len() < 2 {
        return domain("a tour needs at least two points");
    }
    Tour::new(ps, space_filling_order(ps), &Euclidean)
}
