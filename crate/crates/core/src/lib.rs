//! Entropic optimal transport (Sinkhorn) divergence between probability
//! vectors on tensor-product grids, with kernel matvecs factored per axis
//! and each 1-D factor compressed as a hierarchical low-rank matrix.

pub mod error;
pub mod experiment;
pub mod grid;
pub mod hmatrix;
pub mod io;
pub mod kernels;
pub mod kron;
pub mod operator;
pub mod signal;
pub mod simplex;
pub mod sinkhorn;
pub mod wasserstein1d;

pub use error::{Error, Result, SignPart};
pub use grid::{resample_to_grid, Grid1D, TensorGrid};
pub use hmatrix::{build_hmatrix, hmatvec, hmatvec_transpose, HMatrix, HParams};
pub use kernels::{default_smoothness, Cost1D, KernelVariant, RegularizedKernel, SmoothnessParams};
pub use kron::{Factor, FactorList, KernelFactorSet};
pub use operator::LinearOperator;
pub use signal::{split_and_normalize, SignedSignal, SplitSignal};
pub use simplex::ProbabilityVector;
pub use sinkhorn::{Mode, SinkhornConfig, SinkhornSolver, SinkhornState};
