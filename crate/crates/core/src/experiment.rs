//! Shift-recovery experiment on three-pulse signals: loss curves over a
//! sweep of shifts, and timing of the hierarchical divergence versus `n`.

use std::io::Write;
use std::time::Instant;

use rayon::prelude::*;

use crate::error::{Error, Result, SignPart};
use crate::grid::TensorGrid;
use crate::hmatrix::HParams;
use crate::kernels::{default_smoothness, Cost1D, RegularizedKernel};
use crate::signal::{signed_part, split_and_normalize, SignedSignal};
use crate::sinkhorn::{Mode, SinkhornConfig, SinkhornSolver};
use crate::wasserstein1d::w2_1d;

pub const MAX_SHIFT: f64 = 0.3;
pub const DEFAULT_EPS_TOL: f64 = 0.01;
pub const DEFAULT_NUM_SHIFTS: usize = 61;
/// Largest `n` for which sweeps include the dense reference.
pub const DENSE_REFERENCE_MAX_N: usize = 1 << 12;

const CENTERS: [f64; 3] = [0.4, 0.5, 0.6];
const SIGNS: [f64; 3] = [1.0, -1.0, 1.0];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PulseParams {
    pub sigma: f64,
    pub shift: f64,
    pub n: usize,
}

impl PulseParams {
    pub fn new(sigma: f64, shift: f64, n: usize) -> Result<Self> {
        if !(sigma > 0.0 && sigma.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "sigma must be positive, got {sigma}"
            )));
        }
        if shift.is_nan() || shift.abs() > MAX_SHIFT {
            return Err(Error::InvalidParameter(format!(
                "shift must lie in [-{MAX_SHIFT}, {MAX_SHIFT}], got {shift}"
            )));
        }
        if n < 2 {
            return Err(Error::InvalidParameter(format!("need n >= 2, got {n}")));
        }
        Ok(Self { sigma, shift, n })
    }
}

/// `sum_k sign_k exp(-((x - s - c_k) / sigma)^2)` with centers 0.4, 0.5, 0.6
/// and signs +, -, +, sampled at `x_i = i / (n - 1)`.
pub fn three_pulse(params: &PulseParams) -> Result<SignedSignal> {
    let grid = TensorGrid::unit(&[params.n])?;
    let axis = grid.axes()[0];
    let values = (0..params.n)
        .map(|i| {
            let x = axis.point(i) - params.shift;
            CENTERS
                .iter()
                .zip(SIGNS)
                .map(|(c, sign)| sign * (-((x - c) / params.sigma).powi(2)).exp())
                .sum()
        })
        .collect();
    SignedSignal::new(values, grid)
}

fn check_same_grid(f: &SignedSignal, g: &SignedSignal) -> Result<()> {
    if f.grid() != g.grid() {
        return Err(Error::LengthMismatch {
            expected: f.len(),
            got: g.len(),
        });
    }
    Ok(())
}

/// `||f - g||_2`
pub fn euclidean_loss(f: &SignedSignal, g: &SignedSignal) -> Result<f64> {
    check_same_grid(f, g)?;
    Ok(f.values()
        .iter()
        .zip(g.values())
        .map(|(a, b)| (a - b) * (a - b))
        .sum::<f64>()
        .sqrt())
}

/// Sum of the 1-D quadratic Wasserstein distances between the normalized
/// positive parts and between the normalized negative parts.
pub fn wasserstein_loss(f: &SignedSignal, g: &SignedSignal) -> Result<f64> {
    check_same_grid(f, g)?;
    if f.grid().dim() != 1 {
        return Err(Error::InvalidGrid(
            "Wasserstein loss is one-dimensional only".into(),
        ));
    }
    let axis = &f.grid().axes()[0];
    let (fs, gs) = (split_and_normalize(f)?, split_and_normalize(g)?);
    Ok(w2_1d(&fs.pos, &gs.pos, axis)? + w2_1d(&fs.neg, &gs.neg, axis)?)
}

/// Default H-matrix parameters for a cost: `eta0 = 2 / alpha`, `n_min = 32`.
pub fn default_hparams(cost: Cost1D, lambda: f64, eps_tol: f64) -> Result<HParams> {
    let k = RegularizedKernel::kappa(cost, lambda)?;
    Ok(HParams::new(eps_tol, default_smoothness(&k)?))
}

/// Sign-split Sinkhorn loss on a prepared solver.
pub fn sinkhorn_loss_with(
    solver: &SinkhornSolver,
    f: &SignedSignal,
    g: &SignedSignal,
) -> Result<f64> {
    check_same_grid(f, g)?;
    let mut total = 0.0;
    for part in [SignPart::Positive, SignPart::Negative] {
        let (fp, _) = signed_part(f, part)?;
        let (gp, _) = signed_part(g, part)?;
        total += solver.divergence(&fp, &gp)?.1;
    }
    Ok(total)
}

/// Sum of the quadratic Sinkhorn divergences of the normalized sign parts,
/// with exact dense kernels or hierarchical ones (`eps_tol = 0.01`).
pub fn sinkhorn_loss(
    f: &SignedSignal,
    g: &SignedSignal,
    cfg: &SinkhornConfig,
    mode: Mode,
) -> Result<f64> {
    check_same_grid(f, g)?;
    let cost = Cost1D::power(cfg.p)?;
    let params = default_hparams(cost, cfg.lambda, DEFAULT_EPS_TOL)?;
    let solver = SinkhornSolver::new(f.grid(), cost, *cfg, mode, &params)?;
    sinkhorn_loss_with(&solver, f, g)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepConfig {
    pub sigma: f64,
    pub n: usize,
    pub num_shifts: usize,
    pub sinkhorn: SinkhornConfig,
    pub eps_tol: f64,
    pub eta0: Option<f64>,
    pub n_min: usize,
    /// Compute the dense reference curve; defaults to `n <= 4096`.
    pub dense_reference: bool,
}

impl SweepConfig {
    pub fn new(sigma: f64, n: usize, lambda: f64, num_shifts: usize) -> Self {
        Self {
            sigma,
            n,
            num_shifts,
            sinkhorn: SinkhornConfig {
                lambda,
                ..SinkhornConfig::default()
            },
            eps_tol: DEFAULT_EPS_TOL,
            eta0: None,
            n_min: crate::hmatrix::DEFAULT_N_MIN,
            dense_reference: n <= DENSE_REFERENCE_MAX_N,
        }
    }

    fn hparams(&self) -> Result<HParams> {
        let p = default_hparams(Cost1D::SquaredDistance, self.sinkhorn.lambda, self.eps_tol)?;
        let p = p.with_n_min(self.n_min);
        Ok(match self.eta0 {
            Some(e) => p.with_eta0(e),
            None => p,
        })
    }
}

/// `num_shifts` uniform shifts on `[-0.3, 0.3]`; a single shift is `0`.
pub fn sweep_shifts(num_shifts: usize) -> Vec<f64> {
    if num_shifts <= 1 {
        return vec![0.0; num_shifts];
    }
    let m = (num_shifts - 1) as f64;
    (0..num_shifts)
        .map(|k| MAX_SHIFT * (2.0 * k as f64 - m) / m)
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepRow {
    pub shift: f64,
    pub d_e: f64,
    pub d_w: f64,
    /// Dense reference, when computed.
    pub d_s: Option<f64>,
    pub d_s_h: f64,
    pub seconds_dense: Option<f64>,
    pub seconds_hier: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    pub config: SweepConfig,
    pub rows: Vec<SweepRow>,
}

impl SweepResult {
    pub fn shifts(&self) -> Vec<f64> {
        self.rows.iter().map(|r| r.shift).collect()
    }

    pub fn column(&self, f: impl Fn(&SweepRow) -> f64) -> Vec<f64> {
        self.rows.iter().map(f).collect()
    }

    /// Writes `shift,d_E,d_W,d_S,d_S_H`; a missing dense value is empty.
    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "shift,d_E,d_W,d_S,d_S_H")?;
        for r in &self.rows {
            let d_s = r.d_s.map(|v| format!("{v:.17e}")).unwrap_or_default();
            writeln!(
                w,
                "{:.6},{:.17e},{:.17e},{},{:.17e}",
                r.shift, r.d_e, r.d_w, d_s, r.d_s_h
            )?;
        }
        Ok(())
    }
}

fn timed<T>(f: impl FnOnce() -> Result<T>) -> Result<(T, f64)> {
    let start = Instant::now();
    let v = f()?;
    Ok((v, start.elapsed().as_secs_f64()))
}

/// Evaluates every loss at each shift. Shifts are processed in parallel; the
/// values do not depend on scheduling.
pub fn run_sweep(cfg: &SweepConfig) -> Result<SweepResult> {
    let grid = TensorGrid::unit(&[cfg.n])?;
    let f = three_pulse(&PulseParams::new(cfg.sigma, 0.0, cfg.n)?)?;
    let hier = SinkhornSolver::hierarchical(
        &grid,
        Cost1D::SquaredDistance,
        cfg.sinkhorn,
        &cfg.hparams()?,
    )?;
    let dense = if cfg.dense_reference {
        Some(SinkhornSolver::dense(
            &grid,
            Cost1D::SquaredDistance,
            cfg.sinkhorn,
        )?)
    } else {
        None
    };

    let rows = sweep_shifts(cfg.num_shifts)
        .into_par_iter()
        .map(|shift| {
            let g = three_pulse(&PulseParams::new(cfg.sigma, shift, cfg.n)?)?;
            let (d_s_h, seconds_hier) = timed(|| sinkhorn_loss_with(&hier, &f, &g))?;
            let (d_s, seconds_dense) = match &dense {
                Some(solver) => {
                    let (v, t) = timed(|| sinkhorn_loss_with(solver, &f, &g))?;
                    (Some(v), Some(t))
                }
                None => (None, None),
            };
            Ok(SweepRow {
                shift,
                d_e: euclidean_loss(&f, &g)?,
                d_w: wasserstein_loss(&f, &g)?,
                d_s,
                d_s_h,
                seconds_dense,
                seconds_hier,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SweepResult { config: *cfg, rows })
}

/// Indices of the discrete minima of a curve (interior points strictly below
/// both neighbours, endpoints below their single neighbour).
pub fn local_minima(values: &[f64]) -> Vec<usize> {
    let n = values.len();
    (0..n)
        .filter(|&i| {
            let left = i == 0 || values[i] < values[i - 1];
            let right = i + 1 == n || values[i] < values[i + 1];
            n > 1 && left && right
        })
        .collect()
}

pub fn argmin(values: &[f64]) -> Option<usize> {
    values
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1))
        .map(|(i, _)| i)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BenchRow {
    pub n: usize,
    /// Median wall time in seconds.
    pub seconds: f64,
    pub repetitions: usize,
}

pub fn write_bench_csv<W: Write>(mut w: W, rows: &[BenchRow]) -> Result<()> {
    writeln!(w, "n,seconds,repetitions")?;
    for r in rows {
        writeln!(w, "{},{:.6e},{}", r.n, r.seconds, r.repetitions)?;
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BenchConfig {
    pub sigma: f64,
    pub sinkhorn: SinkhornConfig,
    pub eps_tol: f64,
    pub eta0: Option<f64>,
    pub n_min: usize,
    /// Shift of the compared signal.
    pub shift: f64,
    pub repetitions: usize,
    pub mode: Mode,
}

impl BenchConfig {
    pub fn new(lambda: f64, sigma: f64) -> Self {
        Self {
            sigma,
            sinkhorn: SinkhornConfig {
                lambda,
                ..SinkhornConfig::default()
            },
            eps_tol: DEFAULT_EPS_TOL,
            eta0: None,
            n_min: crate::hmatrix::DEFAULT_N_MIN,
            shift: 0.1,
            repetitions: 3,
            mode: Mode::Hierarchical,
        }
    }
}

/// Wall time of one full sign-split divergence evaluation, kernel
/// construction included.
pub fn time_one(n: usize, cfg: &BenchConfig) -> Result<f64> {
    let f = three_pulse(&PulseParams::new(cfg.sigma, 0.0, n)?)?;
    let g = three_pulse(&PulseParams::new(cfg.sigma, cfg.shift, n)?)?;
    let mut params = default_hparams(Cost1D::SquaredDistance, cfg.sinkhorn.lambda, cfg.eps_tol)?
        .with_n_min(cfg.n_min);
    if let Some(eta0) = cfg.eta0 {
        params = params.with_eta0(eta0);
    }
    let (_, secs) = timed(|| {
        let solver = SinkhornSolver::new(
            f.grid(),
            Cost1D::SquaredDistance,
            cfg.sinkhorn,
            cfg.mode,
            &params,
        )?;
        sinkhorn_loss_with(&solver, &f, &g)
    })?;
    Ok(secs)
}

/// Median timing per `n`, measured sequentially.
pub fn bench_scaling(n_list: &[usize], cfg: &BenchConfig) -> Result<Vec<BenchRow>> {
    let reps = cfg.repetitions.max(1);
    n_list
        .iter()
        .map(|&n| {
            let mut times = (0..reps)
                .map(|_| time_one(n, cfg))
                .collect::<Result<Vec<_>>>()?;
            times.sort_by(f64::total_cmp);
            Ok(BenchRow {
                n,
                seconds: times[reps / 2],
                repetitions: reps,
            })
        })
        .collect()
}

/// Least-squares slope of `log y` against `log x`.
pub fn loglog_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let lx: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|y| y.ln()).collect();
    let m = lx.len() as f64;
    let (mx, my) = (lx.iter().sum::<f64>() / m, ly.iter().sum::<f64>() / m);
    let sxy: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = lx.iter().map(|x| (x - mx) * (x - mx)).sum();
    sxy / sxx
}
