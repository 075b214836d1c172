use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use hsinkhorn::hmatrix::DEFAULT_N_MIN;
use hsinkhorn::sinkhorn::{DEFAULT_EPS_S, DEFAULT_LAMBDA, DEFAULT_MAX_ITER};

#[derive(Debug, Parser)]
#[command(
    name = "hsinkhorn",
    version,
    about = "Sinkhorn divergences with hierarchical low-rank kernels"
)]
pub struct Cli {
    /// Worker threads for parallel sections (default: all cores).
    #[arg(long, global = true)]
    pub threads: Option<usize>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Divergence between two probability vectors on a uniform grid.
    Divergence(DivergenceArgs),
    /// Shift-recovery sweep over three-pulse signals; writes a CSV.
    Sweep(SweepArgs),
    /// Median wall time of the divergence versus grid size; writes a CSV.
    Bench(BenchArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Dense,
    Hier,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum DenseReference {
    Auto,
    On,
    Off,
}

#[derive(Debug, Args)]
pub struct SolverArgs {
    #[arg(long, default_value_t = DEFAULT_LAMBDA)]
    pub lambda: f64,
    /// Exponent of the distance cost.
    #[arg(long, default_value_t = 2.0)]
    pub p: f64,
    /// Global H-matrix tolerance.
    #[arg(long, default_value_t = 0.01)]
    pub eps_tol: f64,
    /// Marginal tolerance of the scaling iteration.
    #[arg(long, default_value_t = DEFAULT_EPS_S)]
    pub eps_s: f64,
    /// Admissibility parameter (default 2 / alpha).
    #[arg(long)]
    pub eta0: Option<f64>,
    #[arg(long, default_value_t = DEFAULT_N_MIN)]
    pub n_min: usize,
    #[arg(long, default_value_t = DEFAULT_MAX_ITER)]
    pub max_iter: usize,
}

#[derive(Debug, Args)]
pub struct DivergenceArgs {
    pub f: PathBuf,
    pub g: PathBuf,
    /// Grid sizes per axis, axis 0 first (default: from the file header, or 1-D).
    #[arg(long, value_delimiter = ',')]
    pub nk: Option<Vec<usize>>,
    #[command(flatten)]
    pub solver: SolverArgs,
    #[arg(long, value_enum, default_value_t = ModeArg::Hier)]
    pub mode: ModeArg,
    /// Rescale nonnegative inputs to unit mass instead of rejecting them.
    #[arg(long)]
    pub normalize: bool,
    /// Write the convergence trace (iteration,residual) to this CSV.
    #[arg(long)]
    pub trace: Option<PathBuf>,
    /// Write the H-matrix leaves of every axis factor to this CSV.
    #[arg(long)]
    pub dump_partition: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[arg(long)]
    pub sigma: f64,
    #[arg(long, default_value_t = 4096)]
    pub n: usize,
    #[arg(long, default_value_t = 61)]
    pub num_shifts: usize,
    #[command(flatten)]
    pub solver: SolverArgs,
    /// Dense reference column; `auto` computes it for n <= 4096.
    #[arg(long, value_enum, default_value_t = DenseReference::Auto)]
    pub dense_reference: DenseReference,
    #[arg(long, default_value = "sweep.csv")]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    /// Sizes as `a..b` (powers of two from a to b) or a comma list.
    #[arg(long, default_value = "1024..65536", value_parser = parse_sizes)]
    pub n: Sizes,
    #[arg(long, default_value_t = 0.05)]
    pub sigma: f64,
    #[arg(long, default_value_t = 3)]
    pub repetitions: usize,
    #[command(flatten)]
    pub solver: SolverArgs,
    #[arg(long, value_enum, default_value_t = ModeArg::Hier)]
    pub mode: ModeArg,
    #[arg(long, default_value = "bench.csv")]
    pub out: PathBuf,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Sizes(pub Vec<usize>);

pub fn parse_sizes(s: &str) -> Result<Sizes, String> {
    let int = |t: &str| {
        t.trim()
            .parse::<usize>()
            .map_err(|_| format!("invalid size `{t}`"))
    };
    if let Some((a, b)) = s.split_once("..") {
        let (a, b) = (int(a)?, int(b)?);
        if a == 0 || !a.is_power_of_two() || !b.is_power_of_two() || a > b {
            return Err(format!("range `{s}` needs powers of two a <= b"));
        }
        let sizes = std::iter::successors(Some(a), |&n| (n < b).then_some(n * 2)).collect();
        return Ok(Sizes(sizes));
    }
    let sizes = s.split(',').map(int).collect::<Result<Vec<_>, _>>()?;
    if sizes.is_empty() {
        return Err("empty size list".into());
    }
    Ok(Sizes(sizes))
}

#[cfg(test)]
mod tests {
    use super::*;
    use clap::CommandFactory;

    #[test]
    fn cli_definition_is_consistent() {
        Cli::command().debug_assert();
    }

    #[test]
    fn size_range_doubles() {
        assert_eq!(
            parse_sizes("1024..8192").unwrap().0,
            vec![1024, 2048, 4096, 8192]
        );
        assert_eq!(parse_sizes("64..64").unwrap().0, vec![64]);
        assert!(parse_sizes("1000..4096").is_err());
        assert!(parse_sizes("4096..1024").is_err());
    }

    #[test]
    fn size_list() {
        assert_eq!(parse_sizes("256, 512").unwrap().0, vec![256, 512]);
        assert!(parse_sizes("256,x").is_err());
    }

    #[test]
    fn defaults() {
        let cli = Cli::parse_from(["hsinkhorn", "divergence", "f.csv", "g.csv"]);
        let Command::Divergence(d) = cli.command else {
            panic!("wrong subcommand");
        };
        assert_eq!(d.solver.lambda, 50.0);
        assert_eq!(
            (d.solver.eps_tol, d.solver.eps_s, d.solver.p),
            (0.01, 0.01, 2.0)
        );
        assert_eq!(d.solver.n_min, 32);
        assert_eq!(d.mode, ModeArg::Hier);
    }
}
