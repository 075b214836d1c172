//! Quadtree block partition of an `n x n` kernel matrix.

use crate::error::{Error, Result};
use crate::grid::Grid1D;

/// Half-open contiguous index range `start..end`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct IndexRange {
    pub start: usize,
    pub end: usize,
}

impl IndexRange {
    pub fn new(start: usize, end: usize) -> Self {
        debug_assert!(start < end);
        Self { start, end }
    }

    pub fn len(&self) -> usize {
        self.end - self.start
    }

    pub fn is_empty(&self) -> bool {
        self.end <= self.start
    }

    /// Splits at the midpoint.
    pub fn halves(&self) -> (IndexRange, IndexRange) {
        let mid = self.start + self.len() / 2;
        (
            IndexRange::new(self.start, mid),
            IndexRange::new(mid, self.end),
        )
    }

    pub fn as_range(&self) -> std::ops::Range<usize> {
        self.start..self.end
    }
}

/// `max x_i - min x_i` over the range.
pub fn diam(range: IndexRange, grid: &Grid1D) -> f64 {
    grid.point(range.end - 1) - grid.point(range.start)
}

/// Distance between the coordinate intervals covered by the two ranges;
/// zero when they overlap.
pub fn dist(row: IndexRange, col: IndexRange, grid_x: &Grid1D, grid_y: &Grid1D) -> f64 {
    let (a0, a1) = (grid_x.point(row.start), grid_x.point(row.end - 1));
    let (b0, b1) = (grid_y.point(col.start), grid_y.point(col.end - 1));
    if a1 < b0 {
        b0 - a1
    } else if b1 < a0 {
        a0 - b1
    } else {
        0.0
    }
}

/// `diam(row) / dist(row, col)`, or `None` when the blocks touch.
pub fn eta(row: IndexRange, col: IndexRange, grid_x: &Grid1D, grid_y: &Grid1D) -> Option<f64> {
    let d = dist(row, col, grid_x, grid_y);
    (d > 0.0).then(|| diam(row, grid_x) / d)
}

pub fn admissible(
    row: IndexRange,
    col: IndexRange,
    grid_x: &Grid1D,
    grid_y: &Grid1D,
    eta0: f64,
) -> bool {
    eta(row, col, grid_x, grid_y).is_some_and(|e| e <= eta0)
}

/// Checks `n = n_min * 2^m`.
pub fn check_size(n: usize, n_min: usize) -> Result<()> {
    if n_min == 0 || !n.is_multiple_of(n_min) || !(n / n_min).is_power_of_two() {
        return Err(Error::BadSize { n, n_min });
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq)]
pub enum PartitionKind {
    Admissible { eta: f64 },
    Inadmissible,
    Split(Box<[PartitionNode; 4]>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct PartitionNode {
    pub row: IndexRange,
    pub col: IndexRange,
    pub kind: PartitionKind,
}

impl PartitionNode {
    /// Leaves in depth-first order.
    pub fn leaves(&self) -> Vec<&PartitionNode> {
        let mut out = Vec::new();
        let mut stack = vec![self];
        while let Some(node) = stack.pop() {
            match &node.kind {
                PartitionKind::Split(children) => stack.extend(children.iter().rev()),
                _ => out.push(node),
            }
        }
        out
    }

    pub fn depth(&self) -> usize {
        match &self.kind {
            PartitionKind::Split(children) => {
                1 + children.iter().map(|c| c.depth()).max().unwrap_or(0)
            }
            _ => 0,
        }
    }
}

/// Recursively splits the index square into four equal sub-blocks until a
/// block is admissible or reaches `n_min x n_min`.
pub fn build_partition(
    grid_x: &Grid1D,
    grid_y: &Grid1D,
    eta0: f64,
    n_min: usize,
) -> Result<PartitionNode> {
    let n = grid_x.len();
    if grid_y.len() != n {
        return Err(Error::LengthMismatch {
            expected: n,
            got: grid_y.len(),
        });
    }
    if eta0.is_nan() || eta0 <= 0.0 {
        return Err(Error::InvalidParameter(format!(
            "eta0 must be positive, got {eta0}"
        )));
    }
    check_size(n, n_min)?;
    let full = IndexRange::new(0, n);
    Ok(split(full, full, grid_x, grid_y, eta0, n_min))
}

fn split(
    row: IndexRange,
    col: IndexRange,
    grid_x: &Grid1D,
    grid_y: &Grid1D,
    eta0: f64,
    n_min: usize,
) -> PartitionNode {
    let kind = match eta(row, col, grid_x, grid_y) {
        Some(e) if e <= eta0 => PartitionKind::Admissible { eta: e },
        _ if row.len() <= n_min => PartitionKind::Inadmissible,
        _ => {
            let (r0, r1) = row.halves();
            let (c0, c1) = col.halves();
            let child = |r, c| split(r, c, grid_x, grid_y, eta0, n_min);
            PartitionKind::Split(Box::new([
                child(r0, c0),
                child(r0, c1),
                child(r1, c0),
                child(r1, c1),
            ]))
        }
    };
    PartitionNode { row, col, kind }
}
