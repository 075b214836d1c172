//! Hierarchical (H-) matrix approximation of a 1-D kernel matrix
//! `A = [k(x_i, y_j)]`.
//!
//! The index square is split as a quadtree ([`build_partition`]); admissible
//! leaves hold interpolation factors `L R^T` whose rank is chosen a priori
//! from the kernel's smoothness so that `||A - A_H||_F <= eps_tol`, and the
//! remaining `n_min x n_min` leaves are stored densely.
//!
//! A matvec walks the tree depth first (children in row-major order) and
//! accumulates into the output sequentially, so results are bitwise
//! reproducible. Concurrent matvecs on one `HMatrix` are safe.

mod lowrank;
mod partition;
mod rank;

use std::io::Write;

use ndarray::Array2;

pub use lowrank::{build_lowrank_block, chebyshev_nodes, LowRankFactors};
pub use partition::{
    admissible, build_partition, check_size, diam, dist, eta, IndexRange, PartitionKind,
    PartitionNode,
};
pub use rank::{block_rank, optimal_rank, MAX_RANK};

use crate::error::{Error, Result};
use crate::grid::Grid1D;
use crate::kernels::{RegularizedKernel, SmoothnessParams};
use crate::operator::{check_len, LinearOperator};

pub const DEFAULT_N_MIN: usize = 32;

/// Construction parameters shared by every H-matrix of a problem.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HParams {
    pub eps_tol: f64,
    pub eta0: f64,
    pub n_min: usize,
    pub smoothness: SmoothnessParams,
}

impl HParams {
    /// `eta0 = 2 / alpha`, `n_min = 32`.
    pub fn new(eps_tol: f64, smoothness: SmoothnessParams) -> Self {
        Self {
            eps_tol,
            eta0: smoothness.default_eta0(),
            n_min: DEFAULT_N_MIN,
            smoothness,
        }
    }

    pub fn with_eta0(mut self, eta0: f64) -> Self {
        self.eta0 = eta0;
        self
    }

    pub fn with_n_min(mut self, n_min: usize) -> Self {
        self.n_min = n_min;
        self
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Block {
    LowRank(LowRankFactors),
    /// Direct kernel values. `admissible` marks small admissible blocks
    /// whose selected rank would exceed the block size.
    Dense {
        matrix: Array2<f64>,
        admissible: bool,
    },
    Internal(Box<[BlockNode; 4]>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct BlockNode {
    pub row: IndexRange,
    pub col: IndexRange,
    pub block: Block,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LeafKind {
    LowRank,
    Dense,
    /// Admissible, but stored densely.
    DenseAdmissible,
}

impl LeafKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            LeafKind::LowRank => "lowrank",
            LeafKind::Dense => "dense",
            LeafKind::DenseAdmissible => "dense_admissible",
        }
    }
}

/// Summary of one leaf, as emitted by the partition dump.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LeafInfo {
    pub row: IndexRange,
    pub col: IndexRange,
    pub kind: LeafKind,
    /// Interpolation rank for low-rank leaves, block size otherwise.
    pub rank: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct HMatrix {
    root: BlockNode,
    n: usize,
    params: HParams,
}

/// Builds the H-matrix of `kernel` on `grid_x x grid_y`.
pub fn build_hmatrix(
    kernel: &RegularizedKernel,
    grid_x: &Grid1D,
    grid_y: &Grid1D,
    params: &HParams,
) -> Result<HMatrix> {
    HMatrix::from_fn(|x, y| kernel.eval(x, y), grid_x, grid_y, params)
}

impl HMatrix {
    /// Builds from an arbitrary kernel function assumed to satisfy the
    /// smoothness bound in `params`.
    pub fn from_fn<K: Fn(f64, f64) -> f64>(
        kernel: K,
        grid_x: &Grid1D,
        grid_y: &Grid1D,
        params: &HParams,
    ) -> Result<Self> {
        if params.eps_tol.is_nan() || params.eps_tol <= 0.0 {
            return Err(Error::InvalidParameter(format!(
                "eps_tol must be positive, got {}",
                params.eps_tol
            )));
        }
        let q = params.smoothness.alpha * params.eta0 / 4.0;
        if q >= 1.0 {
            return Err(Error::DivergentRank(q));
        }
        let partition = build_partition(grid_x, grid_y, params.eta0, params.n_min)?;
        let n = grid_x.len();
        let root = assemble(&partition, &kernel, grid_x, grid_y, params, n)?;
        Ok(Self {
            root,
            n,
            params: *params,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn params(&self) -> &HParams {
        &self.params
    }

    pub fn root(&self) -> &BlockNode {
        &self.root
    }

    pub fn leaves(&self) -> Vec<LeafInfo> {
        let mut out = Vec::new();
        let mut stack = vec![&self.root];
        while let Some(node) = stack.pop() {
            let (kind, rank) = match &node.block {
                Block::Internal(children) => {
                    stack.extend(children.iter().rev());
                    continue;
                }
                Block::LowRank(f) => (LeafKind::LowRank, f.rank()),
                Block::Dense {
                    admissible: false, ..
                } => (LeafKind::Dense, node.row.len()),
                Block::Dense {
                    admissible: true, ..
                } => (LeafKind::DenseAdmissible, node.row.len()),
            };
            out.push(LeafInfo {
                row: node.row,
                col: node.col,
                kind,
                rank,
            });
        }
        out
    }

    /// Number of stored reals over all leaves.
    pub fn storage(&self) -> usize {
        fn walk(node: &BlockNode) -> usize {
            match &node.block {
                Block::Internal(children) => children.iter().map(walk).sum(),
                Block::LowRank(f) => f.left.len() + f.right.len(),
                Block::Dense { matrix, .. } => matrix.len(),
            }
        }
        walk(&self.root)
    }

    /// Reassembles the full `n x n` approximation. Intended for tests.
    pub fn to_dense(&self) -> Array2<f64> {
        let mut out = Array2::zeros((self.n, self.n));
        fn walk(node: &BlockNode, out: &mut Array2<f64>) {
            let block = match &node.block {
                Block::Internal(children) => {
                    children.iter().for_each(|c| walk(c, out));
                    return;
                }
                Block::LowRank(f) => f.to_dense(),
                Block::Dense { matrix, .. } => matrix.clone(),
            };
            out.slice_mut(ndarray::s![node.row.as_range(), node.col.as_range()])
                .assign(&block);
        }
        walk(&self.root, &mut out);
        out
    }

    /// `A_H z`
    pub fn matvec(&self, z: &[f64]) -> Result<Vec<f64>> {
        check_len(self.n, z.len())?;
        let mut s = vec![0.0; self.n];
        self.matvec_into(z, &mut s, false);
        Ok(s)
    }

    /// `A_H^T z`
    pub fn matvec_transpose(&self, z: &[f64]) -> Result<Vec<f64>> {
        check_len(self.n, z.len())?;
        let mut s = vec![0.0; self.n];
        self.matvec_into(z, &mut s, true);
        Ok(s)
    }

    /// Overwrites `s` with `A_H z` (or `A_H^T z`). Lengths must equal `n`.
    pub(crate) fn matvec_into(&self, z: &[f64], s: &mut [f64], transpose: bool) {
        debug_assert_eq!(z.len(), self.n);
        debug_assert_eq!(s.len(), self.n);
        s.fill(0.0);
        let mut tmp = Vec::new();
        apply_node(&self.root, z, s, transpose, &mut tmp);
    }
}

fn apply_node(node: &BlockNode, z: &[f64], s: &mut [f64], transpose: bool, tmp: &mut Vec<f64>) {
    let (out_range, in_range) = if transpose {
        (node.col, node.row)
    } else {
        (node.row, node.col)
    };
    let zin = &z[in_range.as_range()];
    match &node.block {
        Block::Internal(children) => {
            for c in children.iter() {
                apply_node(c, z, s, transpose, tmp);
            }
        }
        Block::LowRank(f) => {
            let sout = &mut s[out_range.as_range()];
            if transpose {
                f.apply_transpose_add(zin, sout, tmp);
            } else {
                f.apply_add(zin, sout, tmp);
            }
        }
        Block::Dense { matrix, .. } => {
            let sout = &mut s[out_range.as_range()];
            let ncols = matrix.ncols();
            let data = matrix.as_slice().expect("dense blocks are row-major");
            if transpose {
                for (row, &zi) in data.chunks_exact(ncols).zip(zin) {
                    for (o, a) in sout.iter_mut().zip(row) {
                        *o += a * zi;
                    }
                }
            } else {
                for (row, o) in data.chunks_exact(ncols).zip(sout.iter_mut()) {
                    *o += row.iter().zip(zin).map(|(a, b)| a * b).sum::<f64>();
                }
            }
        }
    }
}

fn dense_block<K: Fn(f64, f64) -> f64>(
    kernel: &K,
    row: IndexRange,
    col: IndexRange,
    grid_x: &Grid1D,
    grid_y: &Grid1D,
) -> Array2<f64> {
    Array2::from_shape_fn((row.len(), col.len()), |(a, b)| {
        kernel(grid_x.point(row.start + a), grid_y.point(col.start + b))
    })
}

fn assemble<K: Fn(f64, f64) -> f64>(
    node: &PartitionNode,
    kernel: &K,
    grid_x: &Grid1D,
    grid_y: &Grid1D,
    params: &HParams,
    n: usize,
) -> Result<BlockNode> {
    let (row, col) = (node.row, node.col);
    let block = match &node.kind {
        PartitionKind::Split(children) => {
            let [a, b, c, d] = &**children;
            let build = |p| assemble(p, kernel, grid_x, grid_y, params, n);
            Block::Internal(Box::new([build(a)?, build(b)?, build(c)?, build(d)?]))
        }
        PartitionKind::Inadmissible => Block::Dense {
            matrix: dense_block(kernel, row, col, grid_x, grid_y),
            admissible: false,
        },
        PartitionKind::Admissible { eta } => {
            let d = dist(row, col, grid_x, grid_y);
            let r = block_rank(&params.smoothness, params.eps_tol, n, *eta, d)?;
            if r > row.len() {
                Block::Dense {
                    matrix: dense_block(kernel, row, col, grid_x, grid_y),
                    admissible: true,
                }
            } else {
                Block::LowRank(build_lowrank_block(kernel, row, col, grid_x, grid_y, r)?)
            }
        }
    };
    Ok(BlockNode { row, col, block })
}

impl LinearOperator for HMatrix {
    fn dim(&self) -> usize {
        self.n
    }

    fn apply(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.matvec(x)
    }

    fn apply_transpose(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.matvec_transpose(x)
    }
}

/// `A_H z`
/// Writes `row_start,row_end,col_start,col_end,kind,rank` rows (half-open
/// ranges), without the header line.
pub fn write_leaves_csv<W: Write>(mut w: W, leaves: &[LeafInfo]) -> Result<()> {
    for l in leaves {
        writeln!(
            w,
            "{},{},{},{},{},{}",
            l.row.start,
            l.row.end,
            l.col.start,
            l.col.end,
            l.kind.as_str(),
            l.rank
        )?;
    }
    Ok(())
}

pub const LEAVES_CSV_HEADER: &str = "row_start,row_end,col_start,col_end,kind,rank";

pub fn hmatvec(h: &HMatrix, z: &[f64]) -> Result<Vec<f64>> {
    h.matvec(z)
}

/// `A_H^T z`
pub fn hmatvec_transpose(h: &HMatrix, z: &[f64]) -> Result<Vec<f64>> {
    h.matvec_transpose(z)
}
