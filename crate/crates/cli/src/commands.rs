use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use hsinkhorn::experiment::{
    bench_scaling, default_hparams, run_sweep, write_bench_csv, BenchConfig, SweepConfig,
};
use hsinkhorn::hmatrix::{write_leaves_csv, LEAVES_CSV_HEADER};
use hsinkhorn::io::read_vector_file;
use hsinkhorn::sinkhorn::write_trace;
use hsinkhorn::{
    Cost1D, Error, Factor, HParams, Mode, ProbabilityVector, Result, SinkhornConfig,
    SinkhornSolver, TensorGrid,
};

use crate::args::{BenchArgs, DenseReference, DivergenceArgs, ModeArg, SolverArgs, SweepArgs};

impl SolverArgs {
    fn sinkhorn(&self) -> SinkhornConfig {
        SinkhornConfig {
            lambda: self.lambda,
            eps_s: self.eps_s,
            max_iter: self.max_iter,
            p: self.p,
        }
    }

    fn hparams(&self, cost: Cost1D) -> Result<HParams> {
        let params = default_hparams(cost, self.lambda, self.eps_tol)?.with_n_min(self.n_min);
        Ok(match self.eta0 {
            Some(eta0) => params.with_eta0(eta0),
            None => params,
        })
    }

    fn require_quadratic(&self) -> Result<()> {
        if self.p != 2.0 {
            return Err(Error::InvalidParameter(format!(
                "the pulse experiment uses the quadratic cost, got p={}",
                self.p
            )));
        }
        Ok(())
    }
}

impl From<ModeArg> for Mode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Dense => Mode::Dense,
            ModeArg::Hier => Mode::Hierarchical,
        }
    }
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

fn to_probability(values: Vec<f64>, normalize: bool) -> Result<ProbabilityVector> {
    if normalize {
        ProbabilityVector::normalized(&values)
    } else {
        ProbabilityVector::new(values)
    }
}

pub fn divergence(args: &DivergenceArgs, out: &mut impl Write) -> Result<()> {
    let (f, f_header) = read_vector_file(&args.f)?;
    let (g, g_header) = read_vector_file(&args.g)?;
    if f.len() != g.len() {
        return Err(Error::LengthMismatch {
            expected: f.len(),
            got: g.len(),
        });
    }
    let nk = match (&args.nk, f_header.or(g_header)) {
        (Some(nk), _) => nk.clone(),
        (None, Some(h)) => h.nk,
        (None, None) => vec![f.len()],
    };
    let n: usize = nk.iter().product();
    if n != f.len() {
        return Err(Error::LengthMismatch {
            expected: n,
            got: f.len(),
        });
    }
    let f = to_probability(f, args.normalize)?;
    let g = to_probability(g, args.normalize)?;

    let grid = TensorGrid::unit(&nk)?;
    let cost = Cost1D::power(args.solver.p)?;
    let cfg = args.solver.sinkhorn();
    let solver = match args.mode {
        ModeArg::Dense => SinkhornSolver::dense(&grid, cost, cfg)?,
        ModeArg::Hier => {
            SinkhornSolver::hierarchical(&grid, cost, cfg, &args.solver.hparams(cost)?)?
        }
    };

    if let Some(path) = &args.dump_partition {
        if args.mode != ModeArg::Hier {
            return Err(Error::InvalidParameter(
                "--dump-partition needs --mode hier".into(),
            ));
        }
        let mut w = create(path)?;
        writeln!(w, "{LEAVES_CSV_HEADER}")?;
        for (axis, factor) in solver.factors().q.factors().iter().enumerate() {
            if let Factor::Hier(h) = factor {
                writeln!(w, "# axis={axis}")?;
                write_leaves_csv(&mut w, &h.leaves())?;
            }
        }
        w.flush()?;
    }

    let mut trace = Vec::new();
    let (state, s) = solver.divergence_traced(&f, &g, |it, r| trace.push((it, r)))?;
    if let Some(path) = &args.trace {
        let mut w = create(path)?;
        write_trace(&mut w, &trace)?;
        w.flush()?;
    }
    writeln!(out, "divergence {s:?}")?;
    writeln!(out, "iterations {}", state.iterations)?;
    writeln!(out, "residual {:e}", state.residual)?;
    Ok(())
}

pub fn sweep(args: &SweepArgs, out: &mut impl Write) -> Result<()> {
    args.solver.require_quadratic()?;
    let mut cfg = SweepConfig::new(args.sigma, args.n, args.solver.lambda, args.num_shifts);
    cfg.sinkhorn = args.solver.sinkhorn();
    cfg.eps_tol = args.solver.eps_tol;
    cfg.eta0 = args.solver.eta0;
    cfg.n_min = args.solver.n_min;
    match args.dense_reference {
        DenseReference::Auto => {}
        DenseReference::On => cfg.dense_reference = true,
        DenseReference::Off => cfg.dense_reference = false,
    }
    // open first so a bad path fails before the computation
    let mut w = create(&args.out)?;
    let result = run_sweep(&cfg)?;
    result.write_csv(&mut w)?;
    w.flush()?;
    writeln!(out, "{}", args.out.display())?;
    Ok(())
}

pub fn bench(args: &BenchArgs, out: &mut impl Write) -> Result<()> {
    args.solver.require_quadratic()?;
    let mut cfg = BenchConfig::new(args.solver.lambda, args.sigma);
    cfg.sinkhorn = args.solver.sinkhorn();
    cfg.eps_tol = args.solver.eps_tol;
    cfg.eta0 = args.solver.eta0;
    cfg.n_min = args.solver.n_min;
    cfg.repetitions = args.repetitions;
    cfg.mode = args.mode.into();
    let mut w = create(&args.out)?;
    let rows = bench_scaling(&args.n.0, &cfg)?;
    write_bench_csv(&mut w, &rows)?;
    w.flush()?;
    writeln!(out, "{}", args.out.display())?;
    Ok(())
}

/// Process exit status for an error: 2 input validation, 3 no convergence,
/// 4 numerical breakdown, 5 I/O.
pub fn exit_code(err: &Error) -> u8 {
    match err {
        Error::MaxIterExceeded { .. } => 3,
        Error::NonpositiveDenominator { .. } | Error::DivergentRank(_) => 4,
        Error::Io(_) => 5,
        Error::NotProbability(_)
        | Error::ZeroMassPart { .. }
        | Error::OutOfRange { .. }
        | Error::InvalidGrid(_)
        | Error::LengthMismatch { .. }
        | Error::UnknownSmoothness(_)
        | Error::BadSize { .. }
        | Error::InvalidParameter(_)
        | Error::Parse { .. } => 2,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exit_code_classes() {
        assert_eq!(
            exit_code(&Error::LengthMismatch {
                expected: 1,
                got: 2
            }),
            2
        );
        assert_eq!(exit_code(&Error::BadSize { n: 48, n_min: 32 }), 2);
        assert_eq!(
            exit_code(&Error::MaxIterExceeded {
                iterations: 1,
                residual: 1.0
            }),
            3
        );
        assert_eq!(exit_code(&Error::DivergentRank(1.0)), 4);
        assert_eq!(exit_code(&Error::Io("x".into())), 5);
    }
}
