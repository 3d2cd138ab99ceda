//! Command-line interface.
//!
//! Exit codes: 0 on success, 1 on I/O or solver failure, 2 on usage errors.

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use tvadal_core::bregman::DEFAULT_MU;
use tvadal_core::TvModel;

use crate::bench::{run_benchmark, BenchmarkConfig, SolverKind, SolverParams};
use crate::pgm::{read_pgm, write_pgm};
use crate::synth::SyntheticSpec;
use crate::trace_csv::write_trace_csv;

#[derive(Debug, Parser)]
#[command(name = "tvadal", version, about = "Total-variation image denoising")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Denoise one PGM image.
    Denoise(DenoiseArgs),
    /// Count iterations each solver needs to reach the reference error.
    Benchmark(BenchmarkArgs),
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum SolverArg {
    Adal,
    Sb,
    Sb2,
}

impl From<SolverArg> for SolverKind {
    fn from(s: SolverArg) -> Self {
        match s {
            SolverArg::Adal => SolverKind::Adal,
            SolverArg::Sb => SolverKind::Sb,
            SolverArg::Sb2 => SolverKind::Sb2,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ModelArg {
    Aniso,
    Iso,
}

impl From<ModelArg> for TvModel {
    fn from(m: ModelArg) -> Self {
        match m {
            ModelArg::Aniso => TvModel::Anisotropic,
            ModelArg::Iso => TvModel::Isotropic,
        }
    }
}

#[derive(Debug, Args)]
struct PenaltyArgs {
    /// TV weight.
    #[arg(long, default_value_t = 30.0)]
    lambda: f64,
    #[arg(long, value_enum, default_value_t = ModelArg::Aniso)]
    model: ModelArg,
    /// ADAL gradient penalty [default: 0.2 aniso, 0.3 iso].
    #[arg(long)]
    mu1: Option<f64>,
    /// ADAL permutation penalty.
    #[arg(long, default_value_t = 1.5)]
    mu2: f64,
    /// Split Bregman penalty.
    #[arg(long, default_value_t = DEFAULT_MU)]
    sb_mu: f64,
    #[arg(long, default_value_t = 1000)]
    max_iters: usize,
}

impl PenaltyArgs {
    fn params(&self, tol: f64) -> SolverParams {
        SolverParams {
            lambda: self.lambda,
            model: self.model.into(),
            mu1: self.mu1,
            mu2: self.mu2,
            sb_mu: self.sb_mu,
            tol,
            max_iters: self.max_iters,
        }
    }
}

#[derive(Debug, Args)]
struct DenoiseArgs {
    /// Input PGM image.
    #[arg(long = "in", value_name = "PGM")]
    input: PathBuf,
    /// Output PGM image.
    #[arg(long, value_name = "PGM")]
    out: PathBuf,
    #[arg(long, value_enum, default_value_t = SolverArg::Adal)]
    solver: SolverArg,
    #[command(flatten)]
    penalty: PenaltyArgs,
    /// Relative residual tolerance.
    #[arg(long, default_value_t = 1e-3)]
    tol: f64,
    /// Write a per-iteration CSV trace (errors are measured against the input).
    #[arg(long, value_name = "CSV")]
    trace: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct BenchmarkArgs {
    /// Clean image: a PGM path or synthetic:NAME[:ROWSxCOLS].
    #[arg(long, value_name = "SOURCE")]
    clean: String,
    /// Noise standard deviation.
    #[arg(long, default_value_t = 30.0)]
    sigma: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Comma-separated solvers.
    #[arg(long, value_enum, value_delimiter = ',', default_value = "adal,sb,sb2")]
    solvers: Vec<SolverArg>,
    #[command(flatten)]
    penalty: PenaltyArgs,
    /// Output report CSV.
    #[arg(long, value_name = "CSV")]
    report: PathBuf,
    /// Directory for per-solver trace CSVs.
    #[arg(long, value_name = "DIR")]
    trace_dir: Option<PathBuf>,
    /// Leave wall_time_s empty so repeated runs give identical files.
    #[arg(long)]
    no_timing: bool,
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    let outcome = match cli.command {
        Command::Denoise(args) => denoise(&args),
        Command::Benchmark(args) => benchmark(&args),
    };
    match outcome {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e:#}");
            1
        }
    }
}

fn denoise(args: &DenoiseArgs) -> Result<()> {
    let b = read_pgm(&args.input).with_context(|| format!("cannot read {}", args.input.display()))?;
    let result = args.penalty.params(args.tol).run(args.solver.into(), &b, &b, |_| false)?;
    write_pgm(&result.u, &args.out).with_context(|| format!("cannot write {}", args.out.display()))?;
    if let Some(path) = &args.trace {
        write_trace_csv(&result.trace, path).with_context(|| format!("cannot write {}", path.display()))?;
    }
    Ok(())
}

fn benchmark(args: &BenchmarkArgs) -> Result<()> {
    let (label, clean) = match args.clean.strip_prefix("synthetic:") {
        Some(spec) => {
            let spec = SyntheticSpec::parse(spec)?;
            (spec.kind.name().to_owned(), spec.render()?)
        }
        None => {
            let path = Path::new(&args.clean);
            let img = read_pgm(path).with_context(|| format!("cannot read {}", path.display()))?;
            let label = path
                .file_stem()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_else(|| "image".to_owned());
            (label, img)
        }
    };
    let mut cfg = BenchmarkConfig::new(label, args.sigma, args.seed, args.penalty.params(1e-3));
    cfg.solvers = args.solvers.iter().map(|&s| s.into()).collect();
    cfg.timing = !args.no_timing;
    let report = run_benchmark(&clean, &cfg)?;
    report.write_report(&args.report)?;
    if let Some(dir) = &args.trace_dir {
        report.write_traces(dir)?;
    }
    Ok(())
}
