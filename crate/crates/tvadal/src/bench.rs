//! Iterations-to-target benchmark.
//!
//! The clean image is corrupted with seeded Gaussian noise, a reference
//! solution is computed with ADAL at a tight tolerance, and its normalized
//! error `eta*` against the clean image becomes the target. Each solver then
//! runs from scratch and reports the first iteration `K` with
//! `|eta(K) - eta*| <= 0.01 eta*`.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::Instant;

use anyhow::{Context, Result};
use tvadal_core::adal::{AdalSolver, InitPolicy, SolverConfig};
use tvadal_core::bregman::{SbConfig, SplitBregman, DEFAULT_MU};
use tvadal_core::metrics::{add_gaussian_noise, normalized_error, NoiseSpec};
use tvadal_core::{Image, SolveResult, TraceRecord, TvModel};

use crate::trace_csv::write_trace_csv;

pub const REPORT_HEADER: &str =
    "image,solver,model,lambda,sigma,seed,eta_star,iterations_to_target,final_psnr,wall_time_s,status";

/// Relative deviation from `eta*` that counts as reaching the target.
pub const TARGET_FRACTION: f64 = 0.01;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolverKind {
    Adal,
    /// Split Bregman, one Gauss-Seidel sweep per iteration.
    Sb,
    /// Split Bregman, two sweeps per iteration.
    Sb2,
}

impl SolverKind {
    pub fn name(self) -> &'static str {
        match self {
            SolverKind::Adal => "adal",
            SolverKind::Sb => "sb",
            SolverKind::Sb2 => "sb2",
        }
    }
}

impl FromStr for SolverKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "adal" => Ok(SolverKind::Adal),
            "sb" => Ok(SolverKind::Sb),
            "sb2" => Ok(SolverKind::Sb2),
            _ => Err(format!("unknown solver {s:?} (expected adal, sb or sb2)")),
        }
    }
}

pub fn model_name(model: TvModel) -> &'static str {
    match model {
        TvModel::Anisotropic => "aniso",
        TvModel::Isotropic => "iso",
    }
}

/// Penalty and iteration settings shared by `denoise` and `benchmark`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverParams {
    pub lambda: f64,
    pub model: TvModel,
    /// `None` picks 0.2 (anisotropic) or 0.3 (isotropic).
    pub mu1: Option<f64>,
    pub mu2: f64,
    pub sb_mu: f64,
    pub tol: f64,
    pub max_iters: usize,
}

impl SolverParams {
    pub fn new(lambda: f64, model: TvModel) -> Self {
        let d = SolverConfig::defaults(model);
        Self {
            lambda,
            model,
            mu1: None,
            mu2: d.mu2,
            sb_mu: DEFAULT_MU,
            tol: d.tol,
            max_iters: d.max_iters,
        }
    }

    pub fn adal_config(&self) -> SolverConfig {
        let d = SolverConfig::defaults(self.model);
        SolverConfig {
            lambda: self.lambda,
            mu1: self.mu1.unwrap_or(d.mu1),
            mu2: self.mu2,
            model: self.model,
            tol: self.tol,
            max_iters: self.max_iters,
            init: InitPolicy::NoisyImage,
        }
    }

    pub fn sb_config(&self, sweeps: usize) -> SbConfig {
        SbConfig {
            lambda: self.lambda,
            mu: self.sb_mu,
            sweeps,
            model: self.model,
            tol: self.tol,
            max_iters: self.max_iters,
        }
    }

    /// Runs `kind` on `b`, measuring trace metrics against `reference`.
    pub fn run(
        &self,
        kind: SolverKind,
        b: &Image,
        reference: &Image,
        stop: impl FnMut(&TraceRecord) -> bool,
    ) -> Result<SolveResult> {
        let shape = b.shape();
        let out = match kind {
            SolverKind::Adal => AdalSolver::new(shape, self.adal_config())?.solve_monitored(b, reference, stop)?,
            SolverKind::Sb => SplitBregman::new(shape, self.sb_config(1))?.solve_monitored(b, reference, stop)?,
            SolverKind::Sb2 => SplitBregman::new(shape, self.sb_config(2))?.solve_monitored(b, reference, stop)?,
        };
        Ok(out)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchmarkConfig {
    /// Label used in the report and in trace file names.
    pub image: String,
    pub sigma: f64,
    pub seed: u64,
    pub solvers: Vec<SolverKind>,
    /// Per-solver settings; `tol` is ignored since runs stop on the target.
    pub params: SolverParams,
    pub reference_tol: f64,
    pub reference_max_iters: usize,
    /// Record wall time per row. Off gives byte-reproducible reports.
    pub timing: bool,
}

impl BenchmarkConfig {
    pub fn new(image: impl Into<String>, sigma: f64, seed: u64, params: SolverParams) -> Self {
        Self {
            image: image.into(),
            sigma,
            seed,
            solvers: vec![SolverKind::Adal, SolverKind::Sb, SolverKind::Sb2],
            params,
            reference_tol: 1e-6,
            reference_max_iters: 20_000,
            timing: true,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Ok,
    Timeout,
}

impl Status {
    pub fn name(self) -> &'static str {
        match self {
            Status::Ok => "ok",
            Status::Timeout => "timeout",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchmarkRow {
    pub solver: SolverKind,
    /// First iteration within the target band, or the cap on timeout.
    pub iterations_to_target: usize,
    pub final_psnr: f64,
    pub wall_time_s: Option<f64>,
    pub status: Status,
    pub trace: Vec<TraceRecord>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchmarkReport {
    pub config: BenchmarkConfig,
    pub eta_star: f64,
    pub reference_iterations: usize,
    pub reference_converged: bool,
    pub rows: Vec<BenchmarkRow>,
}

fn within_target(eta: f64, eta_star: f64) -> bool {
    (eta - eta_star).abs() <= TARGET_FRACTION * eta_star
}

/// The noisy input and the tight-tolerance ADAL solution it is judged against.
#[derive(Debug, Clone, PartialEq)]
pub struct Reference {
    pub noisy: Image,
    pub eta_star: f64,
    pub iterations: usize,
    pub converged: bool,
}

/// Builds the noisy image and solves it with ADAL at `cfg.reference_tol`.
pub fn compute_reference(clean: &Image, cfg: &BenchmarkConfig) -> Result<Reference> {
    let noisy = add_gaussian_noise(clean, NoiseSpec::new(cfg.sigma, cfg.seed)?);
    let mut params = cfg.params;
    params.tol = cfg.reference_tol;
    params.max_iters = cfg.reference_max_iters;
    let solution = params
        .run(SolverKind::Adal, &noisy, clean, |_| false)
        .context("reference solve failed")?;
    let eta_star = normalized_error(&solution.u, clean).context("cannot measure normalized error")?;
    Ok(Reference {
        noisy,
        eta_star,
        iterations: solution.iterations,
        converged: solution.converged,
    })
}

/// Runs the full protocol on `clean`.
pub fn run_benchmark(clean: &Image, cfg: &BenchmarkConfig) -> Result<BenchmarkReport> {
    let reference = compute_reference(clean, cfg)?;
    run_against(clean, cfg, &reference)
}

/// Runs every configured solver against a precomputed reference. Solver
/// rows run on separate threads.
pub fn run_against(clean: &Image, cfg: &BenchmarkConfig, reference: &Reference) -> Result<BenchmarkReport> {
    let eta_star = reference.eta_star;
    let noisy = &reference.noisy;
    let mut params = cfg.params;
    params.tol = f64::MIN_POSITIVE;
    let rows = std::thread::scope(|s| {
        let handles: Vec<_> = cfg
            .solvers
            .iter()
            .map(|&kind| s.spawn(move || run_row(kind, &params, noisy, clean, eta_star, cfg.timing)))
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("benchmark worker panicked"))
            .collect::<Result<Vec<_>>>()
    })?;

    Ok(BenchmarkReport {
        config: cfg.clone(),
        eta_star,
        reference_iterations: reference.iterations,
        reference_converged: reference.converged,
        rows,
    })
}

fn run_row(
    kind: SolverKind,
    params: &SolverParams,
    noisy: &Image,
    clean: &Image,
    eta_star: f64,
    timing: bool,
) -> Result<BenchmarkRow> {
    let start = Instant::now();
    let mut hit = None;
    let result = params
        .run(kind, noisy, clean, |r| {
            let reached = within_target(r.normalized_error, eta_star);
            if reached {
                hit = Some(r.iter);
            }
            reached
        })
        .with_context(|| format!("{} solve failed", kind.name()))?;
    let elapsed = start.elapsed().as_secs_f64();
    let (iterations_to_target, status) = match hit {
        Some(k) => (k, Status::Ok),
        None => (params.max_iters, Status::Timeout),
    };
    Ok(BenchmarkRow {
        solver: kind,
        iterations_to_target,
        final_psnr: result.trace.last().map_or(f64::NAN, |r| r.psnr),
        wall_time_s: timing.then_some(elapsed),
        status,
        trace: result.trace,
    })
}

impl BenchmarkReport {
    pub fn to_csv(&self) -> String {
        let c = &self.config;
        let mut out = String::new();
        out.push_str(REPORT_HEADER);
        out.push('\n');
        for row in &self.rows {
            let wall = row.wall_time_s.map(|t| format!("{t:.6}")).unwrap_or_default();
            writeln!(
                out,
                "{},{},{},{},{},{},{},{},{},{},{}",
                c.image,
                row.solver.name(),
                model_name(c.params.model),
                c.params.lambda,
                c.sigma,
                c.seed,
                self.eta_star,
                row.iterations_to_target,
                row.final_psnr,
                wall,
                row.status.name(),
            )
            .expect("writing to a String");
        }
        out
    }

    pub fn trace_file_name(&self, row: &BenchmarkRow) -> String {
        format!(
            "{}_{}_{}.csv",
            self.config.image,
            row.solver.name(),
            model_name(self.config.params.model)
        )
    }

    pub fn write_report(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        fs::write(path, self.to_csv()).with_context(|| format!("cannot write report {}", path.display()))
    }

    /// Writes one trace CSV per row into `dir`, creating it if needed.
    pub fn write_traces(&self, dir: impl AsRef<Path>) -> Result<Vec<PathBuf>> {
        let dir = dir.as_ref();
        fs::create_dir_all(dir).with_context(|| format!("cannot create {}", dir.display()))?;
        self.rows
            .iter()
            .map(|row| {
                let path = dir.join(self.trace_file_name(row));
                write_trace_csv(&row.trace, &path)
                    .with_context(|| format!("cannot write trace {}", path.display()))?;
                Ok(path)
            })
            .collect()
    }
}
