//! End-to-end acceptance suite. Prints one PASS/FAIL line per criterion and
//! exits nonzero if any criterion fails.

use std::process::ExitCode;
use std::time::Instant;

use hsinkhorn::experiment::{
    argmin, bench_scaling, default_hparams, local_minima, loglog_slope, run_sweep, time_one,
    BenchConfig, SweepConfig, SweepResult,
};
use hsinkhorn::hmatrix::optimal_rank;
use hsinkhorn::kron::{
    entrywise_exp_kron_sum_check, kron_chain, kron_matvec, kron_sum_chain, FactorList,
};
use hsinkhorn::sinkhorn::{dense_sinkhorn, upper_bound_check};
use hsinkhorn::{
    build_hmatrix, Cost1D, Grid1D, Mode, ProbabilityVector, RegularizedKernel, SinkhornConfig,
};
use ndarray::{array, Array2};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const LAMBDA: f64 = 50.0;
const EPS: f64 = 0.01;
const SWEEP_N: usize = 1 << 12;
const SWEEP_SHIFTS: usize = 61;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn random_matrix(rng: &mut ChaCha8Rng, n: usize) -> Array2<f64> {
    Array2::from_shape_fn((n, n), |_| rng.gen_range(-1.0..1.0))
}

fn random_cost(rng: &mut ChaCha8Rng, n: usize) -> Array2<f64> {
    Array2::from_shape_fn((n, n), |_| rng.gen_range(0.0..1.0))
}

fn matvec(a: &Array2<f64>, x: &[f64]) -> Vec<f64> {
    a.dot(&ndarray::ArrayView1::from(x)).to_vec()
}

fn max_abs(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

fn hmatrix_accuracy() -> Outcome {
    let mut worst = 0.0f64;
    let mut parts = Vec::new();
    for n in [256, 1024, 4096] {
        let kernel = RegularizedKernel::kappa(Cost1D::SquaredDistance, LAMBDA).unwrap();
        let params = default_hparams(Cost1D::SquaredDistance, LAMBDA, EPS)
            .unwrap()
            .with_eta0(1.0)
            .with_n_min(32);
        let grid = Grid1D::unit(n).unwrap();
        let h = build_hmatrix(&kernel, &grid, &grid, &params).unwrap();
        let approx = h.to_dense();
        let mut sq = 0.0;
        for ((i, j), a) in approx.indexed_iter() {
            let e = kernel.eval(grid.point(i), grid.point(j)) - a;
            sq += e * e;
        }
        let err = sq.sqrt();
        worst = worst.max(err);
        parts.push(format!("n={n}: {err:.3e}"));
    }
    outcome(worst <= EPS, format!("{} (limit {EPS})", parts.join(", ")))
}

fn kronecker_identities() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut worst = 0.0f64;
    let mut ok = true;
    for d in [2usize, 3] {
        for nk in [2usize, 4, 8] {
            let costs: Vec<Array2<f64>> = (0..d).map(|_| random_cost(&mut rng, nk)).collect();
            let scaled: Vec<Array2<f64>> = costs.iter().map(|c| c * -LAMBDA).collect();
            ok &= entrywise_exp_kron_sum_check(&scaled);

            // cost-weighted kernel: (sum of costs) . (product of kernels)
            let qs: Vec<Array2<f64>> = scaled.iter().map(|c| c.mapv(f64::exp)).collect();
            let q_hats: Vec<Array2<f64>> = costs.iter().zip(&qs).map(|(c, q)| c * q).collect();
            let lhs = kron_sum_chain(&costs) * kron_chain(&qs);
            let mut rhs = Array2::<f64>::zeros(lhs.raw_dim());
            for k in 0..d {
                let mut fs = qs.clone();
                fs[k] = q_hats[k].clone();
                rhs += &kron_chain(&fs);
            }
            let err = (&lhs - &rhs).iter().fold(0.0f64, |m, e| m.max(e.abs()));
            worst = worst.max(err);
        }
    }
    outcome(
        ok && worst <= 1e-12,
        format!("exp identity ok={ok}, max entry error {worst:.2e} (limit 1e-12)"),
    )
}

fn vec_trick() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let shapes: [&[usize]; 5] = [&[512], &[16, 32], &[32, 16], &[8, 8, 8], &[4, 8, 16]];
    let mut worst = 0.0f64;
    for sizes in shapes {
        let mats: Vec<Array2<f64>> = sizes.iter().map(|&n| random_matrix(&mut rng, n)).collect();
        let full = kron_chain(&mats);
        let full_t = full.t().to_owned();
        let list = FactorList::dense(mats).unwrap();
        for _ in 0..20 {
            let w: Vec<f64> = (0..full.nrows())
                .map(|_| rng.gen_range(-1.0..1.0))
                .collect();
            for (use_t, m) in [(false, &full), (true, &full_t)] {
                let got = kron_matvec(&list, &w, use_t).unwrap();
                let want = matvec(m, &w);
                let diff: Vec<f64> = got.iter().zip(&want).map(|(a, b)| a - b).collect();
                worst = worst.max(max_abs(&diff) / max_abs(&want));
            }
        }
    }
    outcome(
        worst <= 1e-12,
        format!("max relative error {worst:.2e} over 5 shapes x 20 vectors (limit 1e-12)"),
    )
}

fn closed_form() -> Outcome {
    let f = ProbabilityVector::new(vec![0.5, 0.5]).unwrap();
    let c = array![[0.0, 1.0], [1.0, 0.0]];
    let mut errs = Vec::new();
    for (p, want) in [(1.0, 0.25), (2.0, 0.5)] {
        let cfg = SinkhornConfig {
            lambda: 3f64.ln(),
            eps_s: 1e-14,
            max_iter: 1000,
            p,
        };
        let (state, s) = dense_sinkhorn(&f, &f, &c, &cfg).unwrap();
        let plan = |i: usize, j: usize| state.u[i] * (-cfg.lambda * c[[i, j]]).exp() * state.v[j];
        errs.push((s - want).abs());
        errs.push((plan(0, 0) - 0.375).abs());
        errs.push((plan(0, 1) - 0.125).abs());
    }
    let worst = errs.iter().fold(0.0f64, |m, e| m.max(*e));
    outcome(
        worst <= 1e-8,
        format!("max deviation from plan (3/8, 1/8) and S = 0.25 / 0.5: {worst:.2e}"),
    )
}

fn domination(sweeps: &[SweepResult]) -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let grid = Grid1D::unit(256).unwrap();
    let cfg = SinkhornConfig::default();
    let mut random_ok = 0;
    for _ in 0..20 {
        let mut draw = || {
            let raw: Vec<f64> = (0..256).map(|_| rng.gen_range(0.0..1.0)).collect();
            ProbabilityVector::normalized(&raw).unwrap()
        };
        let (f, g) = (draw(), draw());
        if upper_bound_check(&f, &g, &grid, &cfg).unwrap() {
            random_ok += 1;
        }
    }
    let mut points = 0;
    let mut sweep_ok = 0;
    let mut min_gap = f64::INFINITY;
    for sweep in sweeps {
        for row in &sweep.rows {
            points += 1;
            let d_s = row.d_s.expect("dense reference");
            min_gap = min_gap.min(d_s - row.d_w);
            if d_s >= row.d_w - 1e-9 {
                sweep_ok += 1;
            }
        }
    }
    outcome(
        random_ok == 20 && sweep_ok == points,
        format!(
            "random {random_ok}/20, sweep {sweep_ok}/{points}, min S - W on sweep {min_gap:.3e}"
        ),
    )
}

fn curve_shape(sweeps: &[SweepResult]) -> Outcome {
    let mut ok = true;
    let mut parts = Vec::new();
    for sweep in sweeps {
        let shifts = sweep.shifts();
        let zero = shifts.iter().position(|&s| s == 0.0).unwrap();
        let sigma = sweep.config.sigma;
        for (name, col) in [
            ("d_W", sweep.column(|r| r.d_w)),
            ("d_S^H", sweep.column(|r| r.d_s_h)),
        ] {
            let at = argmin(&col).unwrap();
            ok &= at == zero;
            parts.push(format!("sigma={sigma} {name} argmin s={:+.2}", shifts[at]));
        }
        if sigma == 0.01 {
            let minima = local_minima(&sweep.column(|r| r.d_e)).len();
            ok &= minima >= 3;
            parts.push(format!("sigma=0.01 d_E local minima {minima}"));
        }
    }
    outcome(ok, parts.join(", "))
}

fn fast_vs_dense(sweeps: &[SweepResult]) -> Outcome {
    let worst = sweeps
        .iter()
        .flat_map(|s| &s.rows)
        .map(|r| (r.d_s_h - r.d_s.unwrap()).abs())
        .fold(0.0f64, f64::max);
    outcome(
        worst <= 0.05,
        format!("max |d_S^H - d_S| = {worst:.3e} (limit 0.05)"),
    )
}

fn scaling() -> Outcome {
    let cfg = BenchConfig::new(LAMBDA, 0.05);
    let ns: Vec<usize> = (10..=16).map(|e| 1usize << e).collect();
    let rows = bench_scaling(&ns, &cfg).unwrap();
    let xs: Vec<f64> = rows.iter().map(|r| r.n as f64).collect();
    let ys: Vec<f64> = rows.iter().map(|r| r.seconds).collect();
    let slope = loglog_slope(&xs, &ys);

    let hier = rows.iter().find(|r| r.n == SWEEP_N).unwrap().seconds;
    let dense_cfg = BenchConfig {
        mode: Mode::Dense,
        ..cfg
    };
    let mut dense: Vec<f64> = (0..3)
        .map(|_| time_one(SWEEP_N, &dense_cfg).unwrap())
        .collect();
    dense.sort_by(f64::total_cmp);
    let speedup = dense[1] / hier;
    let times: Vec<String> = rows.iter().map(|r| format!("{:.3e}", r.seconds)).collect();
    outcome(
        (1.0..=1.4).contains(&slope) && speedup >= 5.0,
        format!(
            "slope {slope:.3} (range [1.0, 1.4]), speedup at n=4096 {speedup:.1}x (min 5x); times [{}]",
            times.join(", ")
        ),
    )
}

fn rank_formula() -> Outcome {
    let r1 = optimal_rank(0.01, 4096, 1.0, 2.0, 1.0).unwrap();
    let r2 = optimal_rank(0.01, 4096, 1.0, 2.0, 0.5).unwrap();
    // direct evaluation of ceil(ln(eps / (c n)) / ln(alpha eta / 4))
    let direct = |eta: f64| ((0.01f64 / 4096.0).ln() / (2.0 * eta / 4.0f64).ln()).ceil() as usize;
    outcome(
        r1 == 19 && r2 == 10 && r1 == direct(1.0) && r2 == direct(0.5),
        format!("eta=1 -> {r1}, eta=0.5 -> {r2}"),
    )
}

fn main() -> ExitCode {
    let start = Instant::now();
    let mut results: Vec<(&str, Outcome)> = vec![
        ("1 hmatrix Frobenius accuracy", hmatrix_accuracy()),
        ("2 Kronecker identities", kronecker_identities()),
        ("3 Kronecker matvec", vec_trick()),
        ("4 two-point closed form", closed_form()),
    ];

    let sweeps: Vec<SweepResult> = [0.05, 0.01]
        .iter()
        .map(|&sigma| {
            let mut cfg = SweepConfig::new(sigma, SWEEP_N, LAMBDA, SWEEP_SHIFTS);
            cfg.eps_tol = EPS;
            cfg.sinkhorn.eps_s = EPS;
            cfg.dense_reference = true;
            run_sweep(&cfg).unwrap()
        })
        .collect();

    results.push(("5 Sinkhorn dominates Wasserstein", domination(&sweeps)));
    results.push(("6 shift-recovery curve shape", curve_shape(&sweeps)));
    results.push(("7 hierarchical vs dense sweep", fast_vs_dense(&sweeps)));
    results.push(("8 near-linear scaling", scaling()));
    results.push(("9 rank formula", rank_formula()));

    let mut failed = 0;
    for (name, o) in &results {
        let tag = if o.pass { "PASS" } else { "FAIL" };
        println!("{tag} criterion {name}: {}", o.detail);
        failed += usize::from(!o.pass);
    }
    println!(
        "acceptance: {} passed, {failed} failed in {:.1}s",
        results.len() - failed,
        start.elapsed().as_secs_f64()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
