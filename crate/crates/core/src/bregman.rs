//! Split Bregman baseline.
//!
//! Works entirely in the column-major frame: `gx = D u` (column differences)
//! and `gy = P^T D P u` (row differences), with the same stencils as
//! [`crate::grid`] so that both solver families minimize the same discrete
//! objective. Each iteration
//!
//! 1. runs `sweeps` Gauss-Seidel cycles on `(mu I + L) u = mu b + gx^T (dx - rx) + gy^T (dy - ry)`,
//!    where `L` is the 5-point Neumann Laplacian,
//! 2. shrinks `(gx u + rx, gy u + ry)` at `lambda * mu` (scalar or blockwise),
//! 3. adds the new constraint gaps to the Bregman variables `rx`, `ry`.
//!
//! With `sweeps = 1` this is the classic method; `sweeps = 2` is its
//! two-cycle variant.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{check_len, Error, Result};
use crate::grid::{self, DiffOperator};
use crate::image::{Image, Shape};
use crate::prox::{shrink, shrink_block, TvModel};
use crate::trace::{SolveResult, TraceRecord};
use crate::vecops::{diff_norm2, norm2};

/// Default penalty `mu`, picked by a grid search over iterations-to-target
/// on the synthetic benchmark images (see `tune_sb_mu` in the `tvadal` crate).
pub const DEFAULT_MU: f64 = 0.5;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SbConfig {
    pub lambda: f64,
    /// Quadratic penalty weight is `1 / (2 mu)`; shrinkage threshold is `lambda * mu`.
    pub mu: f64,
    /// Gauss-Seidel cycles per outer iteration.
    pub sweeps: usize,
    pub model: TvModel,
    pub tol: f64,
    pub max_iters: usize,
}

impl SbConfig {
    pub fn defaults(model: TvModel) -> Self {
        Self {
            lambda: 30.0,
            mu: DEFAULT_MU,
            sweeps: 1,
            model,
            tol: 1e-3,
            max_iters: 1000,
        }
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("lambda", self.lambda), ("mu", self.mu), ("tol", self.tol)] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::Parameter {
                    name,
                    reason: "must be positive and finite",
                });
            }
        }
        if self.sweeps == 0 {
            return Err(Error::Parameter {
                name: "sweeps",
                reason: "must be at least 1",
            });
        }
        if self.max_iters == 0 {
            return Err(Error::Parameter {
                name: "max_iters",
                reason: "must be at least 1",
            });
        }
        Ok(())
    }
}

/// Split Bregman iterate, all vectors column-major.
#[derive(Debug, Clone, PartialEq)]
pub struct SbState {
    pub u: Vec<f64>,
    pub dx: Vec<f64>,
    pub dy: Vec<f64>,
    pub rx: Vec<f64>,
    pub ry: Vec<f64>,
}

impl SbState {
    /// `u = b`, everything else zero.
    pub fn initial(b: &Image) -> Self {
        let len = b.shape().len();
        Self {
            u: b.data().to_vec(),
            dx: vec![0.0; len],
            dy: vec![0.0; len],
            rx: vec![0.0; len],
            ry: vec![0.0; len],
        }
    }

    fn assign(&mut self, other: &SbState) {
        self.u.copy_from_slice(&other.u);
        self.dx.copy_from_slice(&other.dx);
        self.dy.copy_from_slice(&other.dy);
        self.rx.copy_from_slice(&other.rx);
        self.ry.copy_from_slice(&other.ry);
    }

    fn check(&self, len: usize) -> Result<()> {
        for v in [&self.u, &self.dx, &self.dy, &self.rx, &self.ry] {
            check_len(len, v.len())?;
        }
        Ok(())
    }
}

/// Scratch vectors reused across iterations.
#[derive(Debug)]
struct Workspace {
    bufs: [Vec<f64>; 3],
}

impl Workspace {
    fn new(len: usize) -> Self {
        Self {
            bufs: core::array::from_fn(|_| vec![0.0; len]),
        }
    }
}

#[derive(Debug, Clone)]
pub struct SplitBregman {
    shape: Shape,
    cfg: SbConfig,
    col_op: DiffOperator,
}

impl SplitBregman {
    pub fn new(shape: Shape, cfg: SbConfig) -> Result<Self> {
        cfg.validate()?;
        Ok(Self {
            shape,
            cfg,
            col_op: DiffOperator::along_columns(shape),
        })
    }

    pub fn config(&self) -> &SbConfig {
        &self.cfg
    }

    fn gradients(&self, u: &[f64], gx: &mut [f64], gy: &mut [f64]) {
        self.col_op.apply_into(u, gx);
        grid::row_diff_col_frame_into(self.shape, u, gy);
    }

    /// `cycles` lexicographic Gauss-Seidel sweeps starting from `state.u`.
    pub fn gauss_seidel(&self, state: &SbState, b: &Image, cycles: usize) -> Result<Vec<f64>> {
        self.shape.check_same(&b.shape())?;
        state.check(self.shape.len())?;
        let mut ws = Workspace::new(self.shape.len());
        let [g, e, tmp] = &mut ws.bufs;
        self.linear_rhs(state, g, e, tmp);
        let mut u = state.u.clone();
        self.relax(&mut u, b.data(), g, cycles);
        Ok(u)
    }

    /// `g = gx^T (dx - rx) + gy^T (dy - ry)`.
    fn linear_rhs(&self, state: &SbState, g: &mut [f64], e: &mut [f64], tmp: &mut [f64]) {
        for ((e, d), r) in e.iter_mut().zip(&state.dx).zip(&state.rx) {
            *e = d - r;
        }
        self.col_op.apply_transpose_into(e, g);
        for ((e, d), r) in e.iter_mut().zip(&state.dy).zip(&state.ry) {
            *e = d - r;
        }
        grid::row_diff_col_frame_transpose_into(self.shape, e, tmp);
        for (a, b) in g.iter_mut().zip(tmp.iter()) {
            *a += b;
        }
    }

    /// Gauss-Seidel on `(mu I + L) u = mu b + g` in place.
    fn relax(&self, u: &mut [f64], b: &[f64], g: &[f64], cycles: usize) {
        let (n, m) = (self.shape.rows, self.shape.cols);
        let mu = self.cfg.mu;
        for _ in 0..cycles {
            for j in 0..m {
                for i in 0..n {
                    let k = j * n + i;
                    let uk = u[k];
                    let mut lap = 0.0;
                    let mut deg = 0.0;
                    if i > 0 {
                        lap += uk - u[k - 1];
                        deg += 1.0;
                    }
                    if i + 1 < n {
                        lap += uk - u[k + 1];
                        deg += 1.0;
                    }
                    if j > 0 {
                        lap += uk - u[k - n];
                        deg += 1.0;
                    }
                    if j + 1 < m {
                        lap += uk - u[k + n];
                        deg += 1.0;
                    }
                    // same update as u_k = (rhs_k + sum of neighbours) / (mu + deg)
                    u[k] = uk + (mu * (b[k] - uk) + g[k] - lap) / (mu + deg);
                }
            }
        }
    }

    pub fn step(&self, state: &mut SbState, b: &Image) -> Result<()> {
        self.shape.check_same(&b.shape())?;
        state.check(self.shape.len())?;
        self.advance(state, b, &mut Workspace::new(self.shape.len()));
        Ok(())
    }

    fn advance(&self, state: &mut SbState, b: &Image, ws: &mut Workspace) {
        let [gx, gy, tmp] = &mut ws.bufs;
        self.linear_rhs(state, gx, gy, tmp);
        self.relax(&mut state.u, b.data(), gx, self.cfg.sweeps);
        self.gradients(&state.u, gx, gy);
        let t = self.cfg.lambda * self.cfg.mu;
        for k in 0..self.shape.len() {
            let ax = gx[k] + state.rx[k];
            let ay = gy[k] + state.ry[k];
            let (dx, dy) = match self.cfg.model {
                TvModel::Anisotropic => (shrink(ax, t), shrink(ay, t)),
                TvModel::Isotropic => shrink_block(ax, ay, t),
            };
            state.dx[k] = dx;
            state.dy[k] = dy;
            state.rx[k] += gx[k] - dx;
            state.ry[k] += gy[k] - dy;
        }
    }

    /// Primal: largest relative gap `||grad u - d|| / max(1, ||grad u||)`.
    /// Dual: `max(||dx - dx'||, ||dy - dy'||) / mu`, relative to
    /// `max(1, ||rx|| / mu, ||ry|| / mu)`; `r / mu` plays the multiplier role.
    pub fn residuals(&self, state: &SbState, prev: &SbState) -> (f64, f64) {
        self.residuals_with(state, prev, &mut Workspace::new(self.shape.len()))
    }

    fn residuals_with(&self, state: &SbState, prev: &SbState, ws: &mut Workspace) -> (f64, f64) {
        let [gx, gy, _] = &mut ws.bufs;
        self.gradients(&state.u, gx, gy);
        let rel = |a: &[f64], b: &[f64]| diff_norm2(a, b) / norm2(a).max(1.0);
        let primal = rel(gx, &state.dx).max(rel(gy, &state.dy));
        let mu = self.cfg.mu;
        let change = diff_norm2(&state.dx, &prev.dx).max(diff_norm2(&state.dy, &prev.dy)) / mu;
        let scale = (norm2(&state.rx) / mu).max(norm2(&state.ry) / mu).max(1.0);
        (primal, change / scale)
    }

    pub fn solve(&self, b: &Image) -> Result<SolveResult> {
        self.solve_monitored(b, b, |_| false)
    }

    /// Same contract as [`crate::adal::AdalSolver::solve_monitored`]; the
    /// estimate is `u` itself.
    pub fn solve_monitored(
        &self,
        b: &Image,
        reference: &Image,
        mut stop: impl FnMut(&TraceRecord) -> bool,
    ) -> Result<SolveResult> {
        self.shape.check_same(&b.shape())?;
        self.shape.check_same(&reference.shape())?;
        let mut state = SbState::initial(b);
        let mut prev = state.clone();
        let mut ws = Workspace::new(self.shape.len());
        let mut estimate = b.clone();
        let mut trace = Vec::new();
        let mut converged = false;
        for iter in 1..=self.cfg.max_iters {
            prev.assign(&state);
            self.advance(&mut state, b, &mut ws);
            let (primal, dual) = self.residuals_with(&state, &prev, &mut ws);
            estimate.data_mut().copy_from_slice(&state.u);
            let record = TraceRecord::measure(
                iter,
                &estimate,
                b,
                reference,
                self.cfg.lambda,
                self.cfg.model,
                primal,
                dual,
            );
            trace.push(record);
            converged = primal.max(dual) <= self.cfg.tol;
            let halt = stop(&record);
            if converged || halt {
                break;
            }
        }
        Ok(SolveResult {
            u: Image::from_shape(self.shape, state.u)?,
            iterations: trace.len(),
            trace,
            converged,
        })
    }
}

/// Gauss-Seidel cycles on the split Bregman system with penalty `mu`.
pub fn gauss_seidel_sweep(state: &SbState, b: &Image, mu: f64, cycles: usize) -> Result<Vec<f64>> {
    let mut cfg = SbConfig::defaults(TvModel::Anisotropic);
    cfg.mu = mu;
    SplitBregman::new(b.shape(), cfg)?.gauss_seidel(state, b, cycles)
}

pub fn sb_step(state: &SbState, b: &Image, cfg: &SbConfig) -> Result<SbState> {
    let solver = SplitBregman::new(b.shape(), *cfg)?;
    let mut next = state.clone();
    solver.step(&mut next, b)?;
    Ok(next)
}

pub fn sb_solve(b: &Image, cfg: &SbConfig) -> Result<SolveResult> {
    SplitBregman::new(b.shape(), *cfg)?.solve(b)
}

pub fn sb_solve_with_reference(b: &Image, reference: &Image, cfg: &SbConfig) -> Result<SolveResult> {
    SplitBregman::new(b.shape(), *cfg)?.solve_monitored(b, reference, |_| false)
}
