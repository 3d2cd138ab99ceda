//! Grid search for the split Bregman penalty `mu`.
//!
//! Runs the benchmark protocol on every synthetic image (128x128, sigma 30,
//! lambda 30, seed 0) for both TV models and sums iterations-to-target of
//! the one- and two-sweep variants; timeouts count as the iteration cap.
//!
//!     cargo run --release -p tvadal --example tune_sb_mu

use anyhow::Result;
use tvadal::bench::{compute_reference, run_against, BenchmarkConfig, SolverKind, SolverParams, Status};
use tvadal::synth::Synthetic;
use tvadal_core::TvModel;

const GRID: [f64; 12] = [0.01, 0.02, 0.03, 0.05, 0.075, 0.1, 0.15, 0.2, 0.3, 0.5, 0.75, 1.0];

fn main() -> Result<()> {
    let images: Vec<_> = Synthetic::ALL
        .into_iter()
        .map(|g| Ok((g, g.render(128, 128)?)))
        .collect::<Result<_>>()?;

    let mut cases = Vec::new();
    for (g, clean) in &images {
        for model in [TvModel::Anisotropic, TvModel::Isotropic] {
            let mut cfg = BenchmarkConfig::new(g.name(), 30.0, 0, SolverParams::new(30.0, model));
            cfg.solvers = vec![SolverKind::Sb, SolverKind::Sb2];
            cfg.timing = false;
            let reference = compute_reference(clean, &cfg)?;
            cases.push((clean, cfg, reference));
        }
    }

    println!("mu,sb_total,sb2_total,timeouts");
    let mut best = (f64::NAN, usize::MAX);
    for mu in GRID {
        let (mut sb, mut sb2, mut timeouts) = (0, 0, 0);
        for (clean, cfg, reference) in &cases {
            let mut cfg = cfg.clone();
            cfg.params.sb_mu = mu;
            let report = run_against(clean, &cfg, reference)?;
            sb += report.rows[0].iterations_to_target;
            sb2 += report.rows[1].iterations_to_target;
            timeouts += report.rows.iter().filter(|r| r.status == Status::Timeout).count();
        }
        println!("{mu},{sb},{sb2},{timeouts}");
        if sb + sb2 < best.1 {
            best = (mu, sb + sb2);
        }
    }
    println!("best mu = {} (total {})", best.0, best.1);
    Ok(())
}
