//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any criterion fails.

use std::fs;
use std::process::Command;
use std::time::Instant;

use rand::rngs::SmallRng;
use rand::{Rng, SeedableRng};
use tvadal::bench::{run_benchmark, BenchmarkConfig, SolverKind, SolverParams};
use tvadal::synth::{synth_image, Synthetic};
use tvadal_core::adal::{self, AdalSolver, AdalState, InitPolicy, Multipliers, SolverConfig};
use tvadal_core::bregman::{self, SbConfig, SbState};
use tvadal_core::grid::{self, DiffOperator, TridiagSystem};
use tvadal_core::metrics::{add_gaussian_noise, normalized_error, psnr, NoiseSpec};
use tvadal_core::prox::{self, GradientPair};
use tvadal_core::{Image, TvModel};
use tvadal_oracle::{dense, gridsearch, rof, steps};

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

fn main() {
    let criteria: [(&str, fn() -> Outcome); 9] = [
        ("tridiagonal exactness", tridiagonal_exactness),
        ("prox correctness", prox_correctness),
        ("step-level fidelity", step_fidelity),
        ("anisotropic optimality", anisotropic_optimality),
        ("isotropic cross-solver agreement", isotropic_agreement),
        ("iteration-count ordering", iteration_ordering),
        ("fixed points", fixed_points),
        ("metric identities", metric_identities),
        ("determinism", determinism),
    ];
    let mut failed = 0;
    for (k, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let out = check();
        let verdict = if out.pass { "PASS" } else { "FAIL" };
        if !out.pass {
            failed += 1;
        }
        println!(
            "criterion {} ({name}): {verdict} [{:.1}s] {}",
            k + 1,
            start.elapsed().as_secs_f64(),
            out.detail
        );
    }
    println!("acceptance: {} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}

fn tridiagonal_exactness() -> Outcome {
    let mut rng = SmallRng::seed_from_u64(1);
    let mut systems = Vec::with_capacity(500);
    for _ in 0..500 {
        let n = rng.random_range(1..=1024);
        let lower: Vec<f64> = (0..n - 1).map(|_| rng.random_range(-1.0..1.0)).collect();
        let upper: Vec<f64> = (0..n - 1).map(|_| rng.random_range(-1.0..1.0)).collect();
        let diag: Vec<f64> = (0..n)
            .map(|i| {
                let off = if i > 0 { lower[i - 1].abs() } else { 0.0 } + if i + 1 < n { upper[i].abs() } else { 0.0 };
                let d = off + rng.random_range(0.1..2.0);
                if rng.random_bool(0.5) {
                    d
                } else {
                    -d
                }
            })
            .collect();
        let rhs: Vec<f64> = (0..n).map(|_| rng.random_range(-100.0..100.0)).collect();
        systems.push((TridiagSystem::new(lower, diag, upper).unwrap(), rhs));
    }

    let start = Instant::now();
    let solutions: Vec<Vec<f64>> = systems
        .iter()
        .map(|(sys, rhs)| grid::thomas_solve(sys, rhs).unwrap())
        .collect();
    let elapsed = start.elapsed().as_secs_f64();

    let mut worst = 0.0f64;
    for ((sys, rhs), x) in systems.iter().zip(&solutions) {
        let want = dense::solve_banded(&sys.lower, &sys.diag, &sys.upper, rhs);
        for (a, b) in x.iter().zip(&want) {
            worst = worst.max((a - b).abs());
        }
    }
    outcome(
        worst <= 1e-9 && elapsed < 1.0,
        format!("500 systems, max |thomas - oracle| = {worst:.2e}, solve time {elapsed:.3}s"),
    )
}

fn prox_correctness() -> Outcome {
    let mut rng = SmallRng::seed_from_u64(2);
    let scalar_obj = |d: f64, x: f64, t: f64| t * d.abs() + 0.5 * (d - x) * (d - x);
    let block_obj = |d: [f64; 2], x: [f64; 2], t: f64| {
        t * (d[0] * d[0] + d[1] * d[1]).sqrt() + 0.5 * ((d[0] - x[0]).powi(2) + (d[1] - x[1]).powi(2))
    };

    let mut scalar_bad = 0;
    let mut scalar_worst = 0.0f64;
    for _ in 0..10_000 {
        let x = rng.random_range(-50.0..50.0);
        let t = rng.random_range(0.0..20.0);
        let (grid_d, step) = gridsearch::scalar_shrink(x, t, 1e-6);
        let got = prox::soft_threshold(&[x], t).unwrap()[0];
        scalar_worst = scalar_worst.max((got - grid_d).abs() / step);
        // closed form is within one grid step and never worse than the grid minimizer
        if (got - grid_d).abs() > step || scalar_obj(got, x, t) > scalar_obj(grid_d, x, t) + 1e-12 {
            scalar_bad += 1;
        }
    }

    let step = 1e-3;
    let mut block_bad = 0;
    let mut block_worst = 0.0f64;
    for _ in 0..10_000 {
        let x = [rng.random_range(-8.0..8.0), rng.random_range(-8.0..8.0)];
        let t = rng.random_range(0.0..8.0);
        let grid_d = gridsearch::block_shrink(x, t, 10.0, step);
        let got = prox::block_soft_threshold(&[x[0]], &[x[1]], t).unwrap();
        let got = [got.dx[0], got.dy[0]];
        // f - f* >= |d - d*|^2 / 2 and, near the minimizer, f - f* <= L |d - d*|^2 / 2
        // with L = 1 + t / |d*|, so the grid minimizer lies within step * sqrt(L / 2)
        // (plus one step of slack for the grid point itself).
        let norm = (got[0] * got[0] + got[1] * got[1]).sqrt();
        let curvature = 1.0 + t / norm.max(step);
        let tol = step * (curvature / 2.0).sqrt() + step;
        let dist = ((got[0] - grid_d[0]).powi(2) + (got[1] - grid_d[1]).powi(2)).sqrt();
        block_worst = block_worst.max(dist / step);
        if dist > tol || block_obj(got, x, t) > block_obj(grid_d, x, t) + 1e-12 {
            block_bad += 1;
        }
    }
    outcome(
        scalar_bad == 0 && block_bad == 0,
        format!(
            "10^4 scalars: {scalar_bad} mismatches (max {scalar_worst:.2} grid steps); \
             10^4 blocks: {block_bad} mismatches (max {block_worst:.2} grid steps)"
        ),
    )
}

fn random_vec(rng: &mut SmallRng, len: usize, scale: f64) -> Vec<f64> {
    (0..len).map(|_| rng.random_range(-scale..scale)).collect()
}

fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

fn step_fidelity() -> Outcome {
    let (rows, cols) = (4, 4);
    let len = rows * cols;
    let mut worst_adal = 0.0f64;
    let mut worst_sb = 0.0f64;
    for seed in 0..5 {
        let mut rng = SmallRng::seed_from_u64(30 + seed);
        let b_data: Vec<f64> = (0..len).map(|_| rng.random_range(0.0..255.0)).collect();
        let b = Image::new(rows, cols, b_data.clone()).unwrap();

        for model in [TvModel::Anisotropic, TvModel::Isotropic] {
            let cfg = SolverConfig::defaults(model);
            let state = AdalState {
                u: random_vec(&mut rng, len, 255.0),
                v: random_vec(&mut rng, len, 255.0),
                grad: GradientPair {
                    dx: random_vec(&mut rng, len, 60.0),
                    dy: random_vec(&mut rng, len, 60.0),
                },
                multipliers: Multipliers {
                    gx: random_vec(&mut rng, len, 40.0),
                    gy: random_vec(&mut rng, len, 40.0),
                    gz: random_vec(&mut rng, len, 40.0),
                },
            };
            let vars = steps::AdalVars {
                u: state.u.clone(),
                v: state.v.clone(),
                dx: state.grad.dx.clone(),
                dy: state.grad.dy.clone(),
                gx: state.multipliers.gx.clone(),
                gy: state.multipliers.gy.clone(),
                gz: state.multipliers.gz.clone(),
            };
            let iso = model == TvModel::Isotropic;
            let got = match model {
                TvModel::Anisotropic => adal::adal_step_anisotropic(&state, &b, &cfg).unwrap(),
                TvModel::Isotropic => adal::adal_step_isotropic(&state, &b, &cfg).unwrap(),
            };
            let want = steps::adal_step(rows, cols, &vars, &b_data, cfg.lambda, cfg.mu1, cfg.mu2, iso);
            for (g, w) in [
                (&got.u, &want.u),
                (&got.v, &want.v),
                (&got.grad.dx, &want.dx),
                (&got.grad.dy, &want.dy),
                (&got.multipliers.gx, &want.gx),
                (&got.multipliers.gy, &want.gy),
                (&got.multipliers.gz, &want.gz),
            ] {
                worst_adal = worst_adal.max(max_abs_diff(g, w));
            }

            for sweeps in [1, 2] {
                let mut cfg = SbConfig::defaults(model);
                cfg.sweeps = sweeps;
                let state = SbState {
                    u: random_vec(&mut rng, len, 255.0),
                    dx: random_vec(&mut rng, len, 60.0),
                    dy: random_vec(&mut rng, len, 60.0),
                    rx: random_vec(&mut rng, len, 20.0),
                    ry: random_vec(&mut rng, len, 20.0),
                };
                let vars = steps::SbVars {
                    u: state.u.clone(),
                    dx: state.dx.clone(),
                    dy: state.dy.clone(),
                    rx: state.rx.clone(),
                    ry: state.ry.clone(),
                };
                let got = bregman::sb_step(&state, &b, &cfg).unwrap();
                let want = steps::sb_step(rows, cols, &vars, &b_data, cfg.lambda, cfg.mu, sweeps, iso);
                for (g, w) in [
                    (&got.u, &want.u),
                    (&got.dx, &want.dx),
                    (&got.dy, &want.dy),
                    (&got.rx, &want.rx),
                    (&got.ry, &want.ry),
                ] {
                    worst_sb = worst_sb.max(max_abs_diff(g, w));
                }
            }
        }
    }
    outcome(
        worst_adal <= 1e-9 && worst_sb <= 1e-9,
        format!("4x4, 5 seeds x both models: max ADAL deviation {worst_adal:.2e}, max split Bregman deviation {worst_sb:.2e}"),
    )
}

/// Five seeded 16x16 instances: the squares image with Gaussian noise.
fn small_instances() -> Vec<(Image, Image)> {
    let clean = synth_image("squares", 16, 16).unwrap();
    (1..=5)
        .map(|seed| {
            let noisy = add_gaussian_noise(&clean, NoiseSpec::new(30.0, seed).unwrap());
            (clean.clone(), noisy)
        })
        .collect()
}

/// Runs ADAL to `tol` and returns the final state and iteration count.
fn adal_to_tolerance(b: &Image, model: TvModel, tol: f64, cap: usize) -> (AdalState, usize, bool) {
    let mut cfg = SolverConfig::defaults(model);
    cfg.tol = tol;
    cfg.max_iters = cap;
    let solver = AdalSolver::new(b.shape(), cfg).unwrap();
    let mut state = AdalState::initial(b, InitPolicy::NoisyImage);
    for k in 1..=cap {
        let prev = state.clone();
        solver.step(&mut state, b).unwrap();
        if solver.residuals(&state, &prev).max() <= tol {
            return (state, k, true);
        }
    }
    (state, cap, false)
}

fn anisotropic_optimality() -> Outcome {
    let mut worst_rel = 0.0f64;
    let mut worst_gap = 0.0f64;
    let mut all_converged = true;
    let mut iters = Vec::new();
    for (_, b) in small_instances() {
        let shape = b.shape();
        let (state, k, converged) = adal_to_tolerance(&b, TvModel::Anisotropic, 1e-8, 200_000);
        all_converged &= converged;
        iters.push(k);
        let u = state.estimate(shape).unwrap();
        let obj = prox::objective(&u, &b, 30.0, TvModel::Anisotropic).unwrap();

        let oracle = rof::solve(shape.rows, shape.cols, b.data(), 30.0, false, 1e-12, 1_000_000);
        let rel = (obj - oracle.primal).abs() / oracle.primal.abs();
        worst_rel = worst_rel.max(rel);

        let du = grid::apply_d(&DiffOperator::along_columns(shape), &state.u).unwrap();
        let dv = grid::apply_d(&DiffOperator::along_rows(shape), &state.v).unwrap();
        let pu = grid::apply_p(shape, &state.u).unwrap();
        worst_gap = worst_gap
            .max(max_abs_diff(&du, &state.grad.dx))
            .max(max_abs_diff(&dv, &state.grad.dy))
            .max(max_abs_diff(&pu, &state.v));
    }
    outcome(
        all_converged && worst_rel <= 1e-4 && worst_gap <= 1e-4,
        format!(
            "5 instances, ADAL iterations {iters:?}: max relative objective gap to oracle {worst_rel:.2e}, \
             max constraint gap {worst_gap:.2e}"
        ),
    )
}

fn isotropic_agreement() -> Outcome {
    let mut worst = 0.0f64;
    let mut worst_oracle = 0.0f64;
    for (_, b) in small_instances() {
        let shape = b.shape();
        let (state, _, _) = adal_to_tolerance(&b, TvModel::Isotropic, 1e-8, 200_000);
        let u_adal = state.estimate(shape).unwrap();
        let obj_adal = prox::objective(&u_adal, &b, 30.0, TvModel::Isotropic).unwrap();

        let mut cfg = SbConfig::defaults(TvModel::Isotropic);
        cfg.sweeps = 500;
        cfg.tol = 1e-8;
        cfg.max_iters = 20_000;
        let sb = bregman::sb_solve(&b, &cfg).unwrap();
        let obj_sb = prox::objective(&sb.u, &b, 30.0, TvModel::Isotropic).unwrap();
        worst = worst.max((obj_adal - obj_sb).abs() / obj_sb.abs());

        let oracle = rof::solve(shape.rows, shape.cols, b.data(), 30.0, true, 1e-12, 1_000_000);
        worst_oracle = worst_oracle.max((obj_adal - oracle.primal).abs() / oracle.primal.abs());
    }
    outcome(
        worst <= 1e-3,
        format!(
            "5 instances: max relative objective difference ADAL vs split Bregman {worst:.2e} \
             (ADAL vs independent oracle {worst_oracle:.2e})"
        ),
    )
}

fn iteration_ordering() -> Outcome {
    let mut pass = true;
    let mut cells = Vec::new();
    for g in Synthetic::ALL {
        let clean = g.render(128, 128).unwrap();
        for model in [TvModel::Anisotropic, TvModel::Isotropic] {
            let mut cfg = BenchmarkConfig::new(g.name(), 30.0, 1, SolverParams::new(30.0, model));
            cfg.timing = false;
            let report = run_benchmark(&clean, &cfg).unwrap();
            let count = |kind: SolverKind| {
                report
                    .rows
                    .iter()
                    .find(|r| r.solver == kind)
                    .map(|r| r.iterations_to_target)
                    .unwrap()
            };
            let (a, s1, s2) = (count(SolverKind::Adal), count(SolverKind::Sb), count(SolverKind::Sb2));
            let ok = a < s2 && s2 <= s1 && a <= 30;
            pass &= ok;
            cells.push(format!(
                "{}/{}: adal {a} sb2 {s2} sb {s1} {}",
                g.name(),
                tvadal::bench::model_name(model),
                if ok { "ok" } else { "violated" }
            ));
        }
    }
    outcome(pass, cells.join("; "))
}

fn fixed_points() -> Outcome {
    let mut failures = Vec::new();
    for (rows, cols, value) in [(16, 16, 123.4), (5, 9, 0.0), (7, 3, 255.0)] {
        let b = Image::filled(rows, cols, value).unwrap();
        for model in [TvModel::Anisotropic, TvModel::Isotropic] {
            let a = adal::solve(&b, &SolverConfig::defaults(model)).unwrap();
            if a.iterations > 2 || a.u != b {
                failures.push(format!("adal {rows}x{cols} {model:?}"));
            }
            for sweeps in [1, 2] {
                let mut cfg = SbConfig::defaults(model);
                cfg.sweeps = sweeps;
                let s = bregman::sb_solve(&b, &cfg).unwrap();
                if s.iterations > 2 || s.u != b {
                    failures.push(format!("sb{sweeps} {rows}x{cols} {model:?}"));
                }
            }
        }
    }
    outcome(
        failures.is_empty(),
        if failures.is_empty() {
            "3 constant images x 2 models x {adal, sb, sb2}: output equals input bit for bit within 2 iterations".to_owned()
        } else {
            format!("not fixed: {}", failures.join(", "))
        },
    )
}

fn metric_identities() -> Outcome {
    let mut rng = SmallRng::seed_from_u64(8);
    let u0 = Image::from_fn(20, 30, |_, _| rng.random_range(1.0..255.0)).unwrap();
    let psnr_255 = psnr(&u0.map(|v| v + 255.0), &u0).unwrap();
    let psnr_25 = psnr(&u0.map(|v| v - 25.5), &u0).unwrap();
    let eta_double = normalized_error(&u0.map(|v| 2.0 * v), &u0).unwrap();
    let identities = psnr_255.abs() <= 1e-12 && (psnr_25 - 20.0).abs() <= 1e-12 && (eta_double - 1.0).abs() <= 1e-15;

    let mut inversions = 0;
    for _ in 0..100 {
        let sa = rng.random_range(0.1..60.0);
        let sb = rng.random_range(0.1..60.0);
        let a = u0.map(|v| v + sa * rng.random_range(-1.0..1.0));
        let b = u0.map(|v| v + sb * rng.random_range(-1.0..1.0));
        let (ea, eb) = (normalized_error(&a, &u0).unwrap(), normalized_error(&b, &u0).unwrap());
        let (pa, pb) = (psnr(&a, &u0).unwrap(), psnr(&b, &u0).unwrap());
        if (ea < eb) != (pa > pb) {
            inversions += 1;
        }
    }
    outcome(
        identities && inversions == 0,
        format!(
            "PSNR at error 255 = {psnr_255:.3e} dB, at 25.5 = {psnr_25} dB, eta(2u0, u0) = {eta_double}; \
             {inversions} ordering inversions in 100 pairs"
        ),
    )
}

fn determinism() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let run = |tag: &str| {
        let report = dir.path().join(format!("report_{tag}.csv"));
        let traces = dir.path().join(format!("traces_{tag}"));
        let status = Command::new(env!("CARGO_BIN_EXE_tvadal"))
            .args(["benchmark", "--clean", "synthetic:edges-plus-texture:64x64", "--sigma", "30", "--seed", "5"])
            .args(["--model", "iso", "--solvers", "adal,sb,sb2", "--no-timing", "--report"])
            .arg(&report)
            .arg("--trace-dir")
            .arg(&traces)
            .status()
            .unwrap();
        assert!(status.success());
        let mut files = vec![fs::read(&report).unwrap()];
        let mut names: Vec<_> = fs::read_dir(&traces).unwrap().map(|e| e.unwrap().path()).collect();
        names.sort();
        for path in &names {
            files.push(fs::read(path).unwrap());
        }
        (names.len(), files)
    };
    let (n1, first) = run("a");
    let (n2, second) = run("b");
    let identical = n1 == 3 && n2 == 3 && first == second;
    outcome(
        identical,
        format!("two CLI benchmark runs: report + {n1} trace files byte-identical = {identical}"),
    )
}
