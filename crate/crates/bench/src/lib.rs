//! Shared fixtures for the benchmarks.

use hsinkhorn::experiment::{default_hparams, three_pulse, PulseParams};
use hsinkhorn::signal::signed_part;
use hsinkhorn::{
    build_hmatrix, Cost1D, Grid1D, HMatrix, KernelFactorSet, ProbabilityVector, RegularizedKernel,
    SignPart, SinkhornConfig, SinkhornSolver, TensorGrid,
};

pub const LAMBDA: f64 = 50.0;
pub const EPS_TOL: f64 = 0.01;

/// The quadratic-cost kernel matrix on `n` uniform points.
pub fn kernel_hmatrix(n: usize) -> HMatrix {
    let kernel = RegularizedKernel::kappa(Cost1D::SquaredDistance, LAMBDA).unwrap();
    let params = default_hparams(Cost1D::SquaredDistance, LAMBDA, EPS_TOL).unwrap();
    let grid = Grid1D::unit(n).unwrap();
    build_hmatrix(&kernel, &grid, &grid, &params).unwrap()
}

pub fn kernel_factors(sizes: &[usize]) -> KernelFactorSet {
    let params = default_hparams(Cost1D::SquaredDistance, LAMBDA, EPS_TOL).unwrap();
    let grid = TensorGrid::unit(sizes).unwrap();
    KernelFactorSet::hierarchical(&grid, Cost1D::SquaredDistance, LAMBDA, &params).unwrap()
}

pub fn hier_solver(n: usize) -> SinkhornSolver {
    let params = default_hparams(Cost1D::SquaredDistance, LAMBDA, EPS_TOL).unwrap();
    let grid = TensorGrid::unit(&[n]).unwrap();
    let cfg = SinkhornConfig {
        lambda: LAMBDA,
        ..SinkhornConfig::default()
    };
    SinkhornSolver::hierarchical(&grid, Cost1D::SquaredDistance, cfg, &params).unwrap()
}

/// Positive parts of the unshifted and shifted three-pulse signals.
pub fn pulse_pair(n: usize, sigma: f64, shift: f64) -> (ProbabilityVector, ProbabilityVector) {
    let part = |s: f64| {
        let sig = three_pulse(&PulseParams::new(sigma, s, n).unwrap()).unwrap();
        signed_part(&sig, SignPart::Positive).unwrap().0
    };
    (part(0.0), part(shift))
}

/// Deterministic test vector with entries in `[0, 1)`.
pub fn test_vector(n: usize) -> Vec<f64> {
    (0..n)
        .map(|i| (i as f64 * 0.618_033_988_75).fract())
        .collect()
}
