//! Rank-`r` factors `L R^T` of an admissible block from barycentric
//! Lagrange interpolation in `x` on Chebyshev points.

use std::f64::consts::PI;

use ndarray::Array2;

use super::partition::IndexRange;
use crate::error::{Error, Result};
use crate::grid::Grid1D;

/// Relative distance (to the interval diameter) under which a grid point is
/// treated as coinciding with an interpolation node.
const COINCIDENT: f64 = 1e-14;

#[derive(Debug, Clone, PartialEq)]
pub struct LowRankFactors {
    /// `#row x r`
    pub left: Array2<f64>,
    /// `#col x r`
    pub right: Array2<f64>,
}

impl LowRankFactors {
    pub fn rank(&self) -> usize {
        self.left.ncols()
    }

    /// `s += L R^T z`
    pub fn apply_add(&self, z: &[f64], s: &mut [f64], tmp: &mut Vec<f64>) {
        thin_product(&self.right, &self.left, z, s, tmp);
    }

    /// `s += R L^T z`
    pub fn apply_transpose_add(&self, z: &[f64], s: &mut [f64], tmp: &mut Vec<f64>) {
        thin_product(&self.left, &self.right, z, s, tmp);
    }

    pub fn to_dense(&self) -> Array2<f64> {
        self.left.dot(&self.right.t())
    }
}

/// `s += outer * inner^T z`, evaluated as two thin products.
fn thin_product(
    inner: &Array2<f64>,
    outer: &Array2<f64>,
    z: &[f64],
    s: &mut [f64],
    tmp: &mut Vec<f64>,
) {
    let r = inner.ncols();
    tmp.clear();
    tmp.resize(r, 0.0);
    let inner = inner.as_slice().expect("factors are row-major");
    for (row, &zj) in inner.chunks_exact(r).zip(z) {
        for (t, &a) in tmp.iter_mut().zip(row) {
            *t += a * zj;
        }
    }
    let outer = outer.as_slice().expect("factors are row-major");
    for (row, si) in outer.chunks_exact(r).zip(s.iter_mut()) {
        *si += row.iter().zip(tmp.iter()).map(|(a, t)| a * t).sum::<f64>();
    }
}

/// First-kind Chebyshev points of `[a, b]` in descending order.
pub fn chebyshev_nodes(a: f64, b: f64, r: usize) -> Vec<f64> {
    let (mid, half) = ((a + b) / 2.0, (b - a) / 2.0);
    (0..r)
        .map(|k| mid + half * ((2 * k + 1) as f64 * PI / (2 * r) as f64).cos())
        .collect()
}

/// Lagrange basis values `l(t) w_k / (t - t_k)` of the `r` first-kind
/// Chebyshev nodes on `[-1, 1]` at the point `t`.
///
/// With `l(t) = prod (t - t_k)` and nodes `cos((2k+1) pi / 2r)`, the weights
/// `1 / l'(t_k)` are `(-1)^k sin((2k+1) pi / 2r) 2^(r-1) / r`.
fn basis_row(t: f64, nodes: &[f64], out: &mut [f64]) {
    let r = nodes.len();
    if let Some(k) = nodes
        .iter()
        .position(|&tk| (t - tk).abs() < 2.0 * COINCIDENT)
    {
        out.fill(0.0);
        out[k] = 1.0;
        return;
    }
    // l(t) * 2^(r-1), kept as a product of O(1) factors
    let scaled_l: f64 = nodes.iter().map(|&tk| 2.0 * (t - tk)).product::<f64>() / 2.0;
    for (k, (o, &tk)) in out.iter_mut().zip(nodes).enumerate() {
        let theta = (2 * k + 1) as f64 * PI / (2 * r) as f64;
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        let w = sign * theta.sin() / r as f64;
        *o = scaled_l * w / (t - tk);
    }
}

/// Interpolation factors for the block `row x col` of `[kernel(x_i, y_j)]`.
pub fn build_lowrank_block<K: Fn(f64, f64) -> f64>(
    kernel: K,
    row: IndexRange,
    col: IndexRange,
    grid_x: &Grid1D,
    grid_y: &Grid1D,
    r: usize,
) -> Result<LowRankFactors> {
    if r == 0 || r > row.len() {
        return Err(Error::InvalidParameter(format!(
            "rank {r} outside 1..={}",
            row.len()
        )));
    }
    let (a, b) = (grid_x.point(row.start), grid_x.point(row.end - 1));
    let (mid, half) = ((a + b) / 2.0, (b - a) / 2.0);

    let mut left = Array2::zeros((row.len(), r));
    let nodes: Vec<f64>;
    if half > 0.0 {
        let ref_nodes: Vec<f64> = chebyshev_nodes(-1.0, 1.0, r);
        nodes = ref_nodes.iter().map(|t| mid + half * t).collect();
        for (li, i) in left.rows_mut().into_iter().zip(row.as_range()) {
            let t = (grid_x.point(i) - mid) / half;
            basis_row(t, &ref_nodes, li.into_slice().expect("row-major"));
        }
    } else {
        // a single grid point: interpolation is the identity
        nodes = vec![a];
        left.fill(1.0);
    }

    let mut right = Array2::zeros((col.len(), r));
    for (mut rj, j) in right.rows_mut().into_iter().zip(col.as_range()) {
        let y = grid_y.point(j);
        for (v, &xk) in rj.iter_mut().zip(&nodes) {
            *v = kernel(xk, y);
        }
    }
    Ok(LowRankFactors { left, right })
}
