//! Sinkhorn's matrix-scaling iteration and the divergence
//! `S_{p,lambda} = (u^T Q_hat v)^(1/p)`.
//!
//! The kernels are only touched through [`LinearOperator`], so the same
//! iteration runs on dense matrices and on hierarchical Kronecker factors.

use std::io::Write;

use ndarray::Array2;

use crate::error::{Error, Result};
use crate::grid::{Grid1D, TensorGrid};
use crate::hmatrix::HParams;
use crate::kernels::Cost1D;
use crate::kron::{cost_matrix, KernelFactorSet};
use crate::operator::{check_len, LinearOperator};
use crate::simplex::ProbabilityVector;
use crate::wasserstein1d::w2_1d;

pub const DEFAULT_LAMBDA: f64 = 50.0;
pub const DEFAULT_EPS_S: f64 = 0.01;
pub const DEFAULT_MAX_ITER: usize = 10_000;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SinkhornConfig {
    pub lambda: f64,
    /// Stopping tolerance on the max-norm marginal residual.
    pub eps_s: f64,
    pub max_iter: usize,
    /// Divergence order.
    pub p: f64,
}

impl Default for SinkhornConfig {
    fn default() -> Self {
        Self {
            lambda: DEFAULT_LAMBDA,
            eps_s: DEFAULT_EPS_S,
            max_iter: DEFAULT_MAX_ITER,
            p: 2.0,
        }
    }
}

impl SinkhornConfig {
    pub fn validate(&self) -> Result<()> {
        let ok = self.lambda.is_finite()
            && self.lambda > 0.0
            && self.eps_s > 0.0
            && self.max_iter > 0
            && self.p.is_finite()
            && self.p >= 1.0;
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidParameter(format!(
                "bad Sinkhorn configuration {self:?}"
            )))
        }
    }
}

/// Scaling vectors of the plan `diag(u) Q diag(v)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SinkhornState {
    pub u: Vec<f64>,
    pub v: Vec<f64>,
    pub iterations: usize,
    pub residual: f64,
}

/// `num ./ den`. A zero numerator gives zero without looking at the
/// denominator, which an approximate operator may push slightly below zero
/// off the support. A positive numerator over a nonpositive or NaN
/// denominator is an error.
fn divide(num: &[f64], den: &[f64], iteration: usize) -> Result<Vec<f64>> {
    num.iter()
        .zip(den)
        .enumerate()
        .map(|(index, (&a, &b))| {
            if a == 0.0 {
                Ok(0.0)
            } else if b > 0.0 {
                Ok(a / b)
            } else {
                Err(Error::NonpositiveDenominator {
                    index,
                    iteration,
                    value: b,
                })
            }
        })
        .collect()
}

fn marginal_residual(scale: &[f64], product: &[f64], target: &[f64]) -> f64 {
    scale
        .iter()
        .zip(product)
        .zip(target)
        .map(|((s, p), t)| (s * p - t).abs())
        .fold(0.0, f64::max)
}

/// Runs the scaling iteration until both marginal residuals are at most
/// `eps_s`. See [`sinkhorn_scaling_traced`].
pub fn sinkhorn_scaling<Op: LinearOperator>(
    f: &ProbabilityVector,
    g: &ProbabilityVector,
    q: &Op,
    cfg: &SinkhornConfig,
) -> Result<SinkhornState> {
    sinkhorn_scaling_traced(f, g, q, cfg, |_, _| {})
}

/// Scaling iteration `u = f ./ (Q v)`, `v = g ./ (Q^T u)` started from
/// `u = 1/n`, calling `trace(iteration, residual)` after every pass.
///
/// At least one full pass is made. Each pass costs one product with `Q` and
/// one with `Q^T`: the `Q v` computed for the residual is reused by the next
/// `u` update.
pub fn sinkhorn_scaling_traced<Op: LinearOperator>(
    f: &ProbabilityVector,
    g: &ProbabilityVector,
    q: &Op,
    cfg: &SinkhornConfig,
    mut trace: impl FnMut(usize, f64),
) -> Result<SinkhornState> {
    cfg.validate()?;
    let n = q.dim();
    check_len(n, f.len())?;
    check_len(n, g.len())?;
    let (f, g) = (f.as_slice(), g.as_slice());

    let u0 = vec![1.0 / n as f64; n];
    let mut v = divide(g, &q.apply_transpose(&u0)?, 0)?;
    let mut qv = q.apply(&v)?;
    let mut residual = f64::INFINITY;
    for it in 1..=cfg.max_iter {
        let u = divide(f, &qv, it)?;
        let qtu = q.apply_transpose(&u)?;
        v = divide(g, &qtu, it)?;
        qv = q.apply(&v)?;
        residual = marginal_residual(&u, &qv, f).max(marginal_residual(&v, &qtu, g));
        trace(it, residual);
        if residual <= cfg.eps_s {
            return Ok(SinkhornState {
                u,
                v,
                iterations: it,
                residual,
            });
        }
    }
    Err(Error::MaxIterExceeded {
        iterations: cfg.max_iter,
        residual,
    })
}

/// `(u^T Q_hat v)^(1/p)`, with the inner product clamped at zero.
pub fn sinkhorn_divergence<Op: LinearOperator>(
    state: &SinkhornState,
    q_hat: &Op,
    p: f64,
) -> Result<f64> {
    check_len(q_hat.dim(), state.v.len())?;
    let s = q_hat.apply(&state.v)?;
    let inner: f64 = state.u.iter().zip(&s).map(|(a, b)| a * b).sum();
    Ok(inner.max(0.0).powf(1.0 / p))
}

/// Reference solver on an explicit cost matrix: `Q = exp(-lambda C)`,
/// `Q_hat = C . Q`.
pub fn dense_sinkhorn(
    f: &ProbabilityVector,
    g: &ProbabilityVector,
    c: &Array2<f64>,
    cfg: &SinkhornConfig,
) -> Result<(SinkhornState, f64)> {
    cfg.validate()?;
    if c.nrows() != c.ncols() {
        return Err(Error::InvalidParameter("cost matrix must be square".into()));
    }
    let q = c.mapv(|v| (-cfg.lambda * v).exp());
    let q_hat = c * &q;
    let state = sinkhorn_scaling(f, g, &q, cfg)?;
    let s = sinkhorn_divergence(&state, &q_hat, cfg.p)?;
    Ok((state, s))
}

/// How the kernel products are evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    /// Exact dense 1-D factors.
    Dense,
    /// H-matrix 1-D factors.
    Hierarchical,
}

/// Kernel factors for a fixed grid, cost and configuration; reusable across
/// many `(f, g)` pairs.
#[derive(Debug, Clone)]
pub struct SinkhornSolver {
    factors: KernelFactorSet,
    cfg: SinkhornConfig,
}

impl SinkhornSolver {
    pub fn dense(grid: &TensorGrid, cost: Cost1D, cfg: SinkhornConfig) -> Result<Self> {
        cfg.validate()?;
        Ok(Self {
            factors: KernelFactorSet::dense(grid, cost, cfg.lambda)?,
            cfg,
        })
    }

    pub fn hierarchical(
        grid: &TensorGrid,
        cost: Cost1D,
        cfg: SinkhornConfig,
        params: &HParams,
    ) -> Result<Self> {
        cfg.validate()?;
        Ok(Self {
            factors: KernelFactorSet::hierarchical(grid, cost, cfg.lambda, params)?,
            cfg,
        })
    }

    pub fn new(
        grid: &TensorGrid,
        cost: Cost1D,
        cfg: SinkhornConfig,
        mode: Mode,
        params: &HParams,
    ) -> Result<Self> {
        match mode {
            Mode::Dense => Self::dense(grid, cost, cfg),
            Mode::Hierarchical => Self::hierarchical(grid, cost, cfg, params),
        }
    }

    pub fn config(&self) -> &SinkhornConfig {
        &self.cfg
    }

    pub fn factors(&self) -> &KernelFactorSet {
        &self.factors
    }

    pub fn scaling(&self, f: &ProbabilityVector, g: &ProbabilityVector) -> Result<SinkhornState> {
        sinkhorn_scaling(f, g, &self.factors.q_operator(), &self.cfg)
    }

    pub fn divergence(
        &self,
        f: &ProbabilityVector,
        g: &ProbabilityVector,
    ) -> Result<(SinkhornState, f64)> {
        self.divergence_traced(f, g, |_, _| {})
    }

    pub fn divergence_traced(
        &self,
        f: &ProbabilityVector,
        g: &ProbabilityVector,
        trace: impl FnMut(usize, f64),
    ) -> Result<(SinkhornState, f64)> {
        let state = sinkhorn_scaling_traced(f, g, &self.factors.q_operator(), &self.cfg, trace)?;
        let s = sinkhorn_divergence(&state, &self.factors.q_hat_operator(), self.cfg.p)?;
        Ok((state, s))
    }
}

/// Writes an `iteration,residual` trace.
pub fn write_trace<W: Write>(mut w: W, trace: &[(usize, f64)]) -> Result<()> {
    writeln!(w, "iteration,residual")?;
    for (it, r) in trace {
        writeln!(w, "{it},{r:e}")?;
    }
    Ok(())
}

/// Whether the quadratic Sinkhorn divergence dominates the 1-D quadratic
/// Wasserstein distance, up to `1e-9`.
pub fn upper_bound_check(
    f: &ProbabilityVector,
    g: &ProbabilityVector,
    grid: &Grid1D,
    cfg: &SinkhornConfig,
) -> Result<bool> {
    let cfg = SinkhornConfig { p: 2.0, ..*cfg };
    let c = cost_matrix(&Cost1D::SquaredDistance, grid);
    let (_, s) = dense_sinkhorn(f, g, &c, &cfg)?;
    let w = w2_1d(f, g, grid)?;
    Ok(s >= w - 1e-9)
}
