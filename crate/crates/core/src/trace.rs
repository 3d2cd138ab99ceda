use alloc::vec::Vec;

use crate::image::Image;
use crate::metrics;
use crate::prox::{self, TvModel};

/// One row of a solver trace.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceRecord {
    /// Number of completed iterations.
    pub iter: usize,
    /// ROF objective at the current estimate.
    pub objective: f64,
    /// `||u - u0|| / ||u0||` against the reference image (NaN if the
    /// reference is all zeros).
    pub normalized_error: f64,
    /// PSNR in dB against the reference image.
    pub psnr: f64,
    pub primal_residual: f64,
    pub dual_residual: f64,
}

impl TraceRecord {
    pub(crate) fn measure(
        iter: usize,
        estimate: &Image,
        b: &Image,
        reference: &Image,
        lambda: f64,
        model: TvModel,
        primal_residual: f64,
        dual_residual: f64,
    ) -> Self {
        // shapes were checked when the solve started
        Self {
            iter,
            objective: prox::objective(estimate, b, lambda, model).unwrap_or(f64::NAN),
            normalized_error: metrics::normalized_error(estimate, reference).unwrap_or(f64::NAN),
            psnr: metrics::psnr(estimate, reference).unwrap_or(f64::NAN),
            primal_residual,
            dual_residual,
        }
    }
}

/// Output of a full solve.
#[derive(Debug, Clone, PartialEq)]
pub struct SolveResult {
    /// The denoised image.
    pub u: Image,
    pub iterations: usize,
    /// One record per iteration.
    pub trace: Vec<TraceRecord>,
    /// Whether the residual tolerance was met.
    pub converged: bool,
}
