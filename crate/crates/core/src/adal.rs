//! Alternating direction augmented Lagrangian (ADAL) solvers.
//!
//! The ROF problem is rewritten with a column-major image `u`, its row-major
//! copy `v`, and gradient variables `dx`, `dy`:
//!
//! ```text
//! min  lambda * R(dx, dy) + 1/2 ||u - b||^2
//! s.t. dx = D u,   dy = D v,   v = P u
//! ```
//!
//! where `D` differentiates along runs (columns of `u`, rows of `v`) and `R`
//! is the anisotropic or isotropic TV penalty. Each iteration updates the
//! gradient variables by shrinkage, then `v` and `u` by exact tridiagonal
//! solves, then the three multiplier vectors. For the anisotropic model the
//! iteration is a two-block ADMM on `(dx, v)` / `(dy, u)` and converges for
//! any positive penalties.
//!
//! The tridiagonal subproblems are solved in correction form: the residual
//! of the current iterate is computed with differences (`b - u`, `P^T v - u`,
//! ...) and the correction is added back. This is the same linear solve, but
//! a point that already satisfies the system stays bit-for-bit unchanged.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::grid::{self, DiffOperator, ThomasFactor};
use crate::image::{Image, Shape};
use crate::prox::{shrink, shrink_block, GradientPair, TvModel};
use crate::trace::{SolveResult, TraceRecord};
use crate::vecops::{diff_norm2, norm2};

/// Lagrange multipliers for `Du = dx`, `Dv = dy` and `Pu = v`.
#[derive(Debug, Clone, PartialEq)]
pub struct Multipliers {
    pub gx: Vec<f64>,
    pub gy: Vec<f64>,
    pub gz: Vec<f64>,
}

impl Multipliers {
    pub fn zeros(len: usize) -> Self {
        Self {
            gx: vec![0.0; len],
            gy: vec![0.0; len],
            gz: vec![0.0; len],
        }
    }
}

/// How the primal variables are initialized.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum InitPolicy {
    /// `u = b`, `v = Pb`, gradients and multipliers zero.
    #[default]
    NoisyImage,
    /// Everything zero.
    Zero,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverConfig {
    /// TV weight.
    pub lambda: f64,
    /// Penalty on the gradient constraints.
    pub mu1: f64,
    /// Penalty on the permutation constraint `v = Pu`.
    pub mu2: f64,
    pub model: TvModel,
    /// Stop once `max(primal, dual)` relative residual is at most this.
    pub tol: f64,
    pub max_iters: usize,
    pub init: InitPolicy,
}

impl SolverConfig {
    /// `lambda = 30`, `mu2 = 1.5`, `mu1 = 0.2` (anisotropic) or `0.3`
    /// (isotropic), tolerance `1e-3`.
    pub fn defaults(model: TvModel) -> Self {
        let mu1 = match model {
            TvModel::Anisotropic => 0.2,
            TvModel::Isotropic => 0.3,
        };
        Self {
            lambda: 30.0,
            mu1,
            mu2: 1.5,
            model,
            tol: 1e-3,
            max_iters: 1000,
            init: InitPolicy::NoisyImage,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let positive = |name, v: f64| {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(Error::Parameter {
                    name,
                    reason: "must be positive and finite",
                })
            }
        };
        positive("lambda", self.lambda)?;
        positive("mu1", self.mu1)?;
        positive("mu2", self.mu2)?;
        positive("tol", self.tol)?;
        if self.max_iters == 0 {
            return Err(Error::Parameter {
                name: "max_iters",
                reason: "must be at least 1",
            });
        }
        Ok(())
    }
}

/// Iterate of the ADAL method.
#[derive(Debug, Clone, PartialEq)]
pub struct AdalState {
    /// Column-major image.
    pub u: Vec<f64>,
    /// Row-major image, constrained to equal `Pu`.
    pub v: Vec<f64>,
    pub grad: GradientPair,
    pub multipliers: Multipliers,
}

impl AdalState {
    pub fn initial(b: &Image, init: InitPolicy) -> Self {
        let len = b.shape().len();
        let (u, v) = match init {
            InitPolicy::NoisyImage => (b.data().to_vec(), b.to_row_major()),
            InitPolicy::Zero => (vec![0.0; len], vec![0.0; len]),
        };
        Self {
            u,
            v,
            grad: GradientPair::zeros(len),
            multipliers: Multipliers::zeros(len),
        }
    }

    /// The averaged estimate `(u + P^T v) / 2`.
    pub fn estimate(&self, shape: Shape) -> Result<Image> {
        self.check(shape.len())?;
        let mut data = vec![0.0; shape.len()];
        self.write_estimate(shape, &mut data);
        Image::from_shape(shape, data)
    }

    fn write_estimate(&self, shape: Shape, out: &mut [f64]) {
        let (n, m) = (shape.rows, shape.cols);
        for (j, (col, u)) in out.chunks_exact_mut(n).zip(self.u.chunks_exact(n)).enumerate() {
            for (i, (o, &uk)) in col.iter_mut().zip(u).enumerate() {
                *o = 0.5 * (uk + self.v[i * m + j]);
            }
        }
    }

    /// Overwrites `self` with `other` without reallocating.
    fn assign(&mut self, other: &AdalState) {
        self.u.copy_from_slice(&other.u);
        self.v.copy_from_slice(&other.v);
        self.grad.dx.copy_from_slice(&other.grad.dx);
        self.grad.dy.copy_from_slice(&other.grad.dy);
        self.multipliers.gx.copy_from_slice(&other.multipliers.gx);
        self.multipliers.gy.copy_from_slice(&other.multipliers.gy);
        self.multipliers.gz.copy_from_slice(&other.multipliers.gz);
    }

    fn check(&self, len: usize) -> Result<()> {
        for v in [
            &self.u,
            &self.v,
            &self.grad.dx,
            &self.grad.dy,
            &self.multipliers.gx,
            &self.multipliers.gy,
            &self.multipliers.gz,
        ] {
            crate::error::check_len(len, v.len())?;
        }
        Ok(())
    }
}

/// Relative primal and dual residuals.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Residuals {
    pub primal: f64,
    pub dual: f64,
}

impl Residuals {
    pub fn max(&self) -> f64 {
        self.primal.max(self.dual)
    }
}

/// Scratch vectors reused across iterations.
#[derive(Debug)]
struct Workspace {
    bufs: [Vec<f64>; 4],
}

impl Workspace {
    fn new(len: usize) -> Self {
        Self {
            bufs: core::array::from_fn(|_| vec![0.0; len]),
        }
    }
}

/// ADAL solver for one image shape and configuration. Holds the
/// factorizations of the two tridiagonal systems, which never change.
#[derive(Debug, Clone)]
pub struct AdalSolver {
    shape: Shape,
    cfg: SolverConfig,
    col_op: DiffOperator,
    row_op: DiffOperator,
    /// `D^T D + (mu1/mu2 + mu1) I` on a single column run; every run shares it.
    u_factor: ThomasFactor,
    /// `D^T D + (mu1/mu2) I` on a single row run.
    v_factor: ThomasFactor,
}

impl AdalSolver {
    pub fn new(shape: Shape, cfg: SolverConfig) -> Result<Self> {
        cfg.validate()?;
        let col_op = DiffOperator::along_columns(shape);
        let row_op = DiffOperator::along_rows(shape);
        let ratio = cfg.mu1 / cfg.mu2;
        let u_factor = grid::assemble_shifted_gram(&DiffOperator::new(shape.rows, 1)?, ratio + cfg.mu1)?.factor()?;
        let v_factor = grid::assemble_shifted_gram(&DiffOperator::new(shape.cols, 1)?, ratio)?.factor()?;
        Ok(Self {
            shape,
            cfg,
            col_op,
            row_op,
            u_factor,
            v_factor,
        })
    }

    pub fn config(&self) -> &SolverConfig {
        &self.cfg
    }

    pub fn shape(&self) -> Shape {
        self.shape
    }

    fn check_inputs(&self, state: &AdalState, b: &Image) -> Result<()> {
        self.shape.check_same(&b.shape())?;
        state.check(self.shape.len())
    }

    /// One iteration of the configured model.
    pub fn step(&self, state: &mut AdalState, b: &Image) -> Result<()> {
        self.check_inputs(state, b)?;
        self.advance(state, b, &mut Workspace::new(self.shape.len()));
        Ok(())
    }

    fn advance(&self, state: &mut AdalState, b: &Image, ws: &mut Workspace) {
        match self.cfg.model {
            TvModel::Anisotropic => self.advance_anisotropic(state, b, ws),
            TvModel::Isotropic => self.advance_isotropic(state, b, ws),
        }
    }

    /// `dx` shrinkage, `v` solve, `dy` shrinkage, `u` solve, multipliers.
    pub fn step_anisotropic(&self, s: &mut AdalState, b: &Image) -> Result<()> {
        self.check_inputs(s, b)?;
        self.advance_anisotropic(s, b, &mut Workspace::new(self.shape.len()));
        Ok(())
    }

    fn advance_anisotropic(&self, s: &mut AdalState, b: &Image, ws: &mut Workspace) {
        let mu1 = self.cfg.mu1;
        let t = self.cfg.lambda * mu1;

        let tmp = &mut ws.bufs[0];
        self.col_op.apply_into(&s.u, tmp);
        for ((d, du), g) in s.grad.dx.iter_mut().zip(tmp.iter()).zip(&s.multipliers.gx) {
            *d = shrink(du + mu1 * g, t);
        }

        self.update_v(s, ws);

        let tmp = &mut ws.bufs[0];
        self.row_op.apply_into(&s.v, tmp);
        for ((d, dv), g) in s.grad.dy.iter_mut().zip(tmp.iter()).zip(&s.multipliers.gy) {
            *d = shrink(dv + mu1 * g, t);
        }

        self.update_u(s, b.data(), ws);
        self.update_multipliers(s, ws);
    }

    /// Joint block shrinkage of `(dx, dy)`, then `v`, `u`, multipliers.
    ///
    /// Each block pairs the column difference and the row difference at the
    /// same pixel, so `dy` is mapped into the column-major frame for the
    /// shrinkage and back afterwards.
    pub fn step_isotropic(&self, s: &mut AdalState, b: &Image) -> Result<()> {
        self.check_inputs(s, b)?;
        self.advance_isotropic(s, b, &mut Workspace::new(self.shape.len()));
        Ok(())
    }

    fn advance_isotropic(&self, s: &mut AdalState, b: &Image, ws: &mut Workspace) {
        let mu1 = self.cfg.mu1;
        let t = self.cfg.lambda * mu1;
        let [ax, ay_row, ay, _] = &mut ws.bufs;

        self.col_op.apply_into(&s.u, ax);
        for (a, g) in ax.iter_mut().zip(&s.multipliers.gx) {
            *a += mu1 * g;
        }
        self.row_op.apply_into(&s.v, ay_row);
        for (a, g) in ay_row.iter_mut().zip(&s.multipliers.gy) {
            *a += mu1 * g;
        }
        grid::permute_transpose_into(self.shape, ay_row, ay);
        for k in 0..self.shape.len() {
            let (x, y) = shrink_block(ax[k], ay[k], t);
            s.grad.dx[k] = x;
            ay[k] = y;
        }
        grid::permute_into(self.shape, ay, &mut s.grad.dy);

        self.update_v(s, ws);
        self.update_u(s, b.data(), ws);
        self.update_multipliers(s, ws);
    }

    /// Solves `(D^T D + c I) v = D^T (dy - mu1 gy) + mu1 gz + c P u`, `c = mu1/mu2`.
    fn update_v(&self, s: &mut AdalState, ws: &mut Workspace) {
        let mu1 = self.cfg.mu1;
        let c = mu1 / self.cfg.mu2;
        let [inner, r, pu, _] = &mut ws.bufs;

        self.row_op.apply_into(&s.v, inner);
        for ((x, dy), gy) in inner.iter_mut().zip(&s.grad.dy).zip(&s.multipliers.gy) {
            *x = dy - mu1 * gy - *x;
        }
        self.row_op.apply_transpose_into(inner, r);
        grid::permute_into(self.shape, &s.u, pu);
        for k in 0..self.shape.len() {
            r[k] += mu1 * s.multipliers.gz[k] + c * (pu[k] - s.v[k]);
        }
        self.v_factor.solve_runs_in_place(r);
        for (v, dv) in s.v.iter_mut().zip(r.iter()) {
            *v += dv;
        }
    }

    /// Solves `(D^T D + (c + mu1) I) u = mu1 b + D^T (dx - mu1 gx) + P^T (c v - mu1 gz)`.
    fn update_u(&self, s: &mut AdalState, b: &[f64], ws: &mut Workspace) {
        let mu1 = self.cfg.mu1;
        let c = mu1 / self.cfg.mu2;
        let [inner, r, vt, gzt] = &mut ws.bufs;

        self.col_op.apply_into(&s.u, inner);
        for ((x, dx), gx) in inner.iter_mut().zip(&s.grad.dx).zip(&s.multipliers.gx) {
            *x = dx - mu1 * gx - *x;
        }
        self.col_op.apply_transpose_into(inner, r);
        grid::permute_transpose_into(self.shape, &s.v, vt);
        grid::permute_transpose_into(self.shape, &s.multipliers.gz, gzt);
        for k in 0..self.shape.len() {
            r[k] += mu1 * (b[k] - s.u[k]) + c * (vt[k] - s.u[k]) - mu1 * gzt[k];
        }
        self.u_factor.solve_runs_in_place(r);
        for (u, du) in s.u.iter_mut().zip(r.iter()) {
            *u += du;
        }
    }

    fn update_multipliers(&self, s: &mut AdalState, ws: &mut Workspace) {
        let (mu1, mu2) = (self.cfg.mu1, self.cfg.mu2);
        let tmp = &mut ws.bufs[0];

        self.col_op.apply_into(&s.u, tmp);
        for ((g, du), dx) in s.multipliers.gx.iter_mut().zip(tmp.iter()).zip(&s.grad.dx) {
            *g += (du - dx) / mu1;
        }
        self.row_op.apply_into(&s.v, tmp);
        for ((g, dv), dy) in s.multipliers.gy.iter_mut().zip(tmp.iter()).zip(&s.grad.dy) {
            *g += (dv - dy) / mu1;
        }
        grid::permute_into(self.shape, &s.u, tmp);
        for ((g, pu), v) in s.multipliers.gz.iter_mut().zip(tmp.iter()).zip(&s.v) {
            *g += (pu - v) / mu2;
        }
    }

    /// Primal residual: the largest constraint gap relative to
    /// `max(1, ||Du||)`, `max(1, ||Dv||)`, `max(1, ||Pu||)`.
    ///
    /// Dual residual: the largest of `||dx - dx'|| / mu1`, `||dy - dy'|| / mu1`
    /// and `||v - v'|| / mu2` (primed values from `prev`), relative to
    /// `max(1, ||gx||, ||gy||, ||gz||)`.
    pub fn residuals(&self, state: &AdalState, prev: &AdalState) -> Residuals {
        self.residuals_with(state, prev, &mut Workspace::new(self.shape.len()))
    }

    fn residuals_with(&self, state: &AdalState, prev: &AdalState, ws: &mut Workspace) -> Residuals {
        let [du, dv, pu, _] = &mut ws.bufs;
        self.col_op.apply_into(&state.u, du);
        self.row_op.apply_into(&state.v, dv);
        grid::permute_into(self.shape, &state.u, pu);

        let rel = |a: &[f64], b: &[f64]| diff_norm2(a, b) / norm2(a).max(1.0);
        let primal = rel(du, &state.grad.dx)
            .max(rel(dv, &state.grad.dy))
            .max(rel(pu, &state.v));

        let (mu1, mu2) = (self.cfg.mu1, self.cfg.mu2);
        let change = (diff_norm2(&state.grad.dx, &prev.grad.dx) / mu1)
            .max(diff_norm2(&state.grad.dy, &prev.grad.dy) / mu1)
            .max(diff_norm2(&state.v, &prev.v) / mu2);
        let m = &state.multipliers;
        let scale = norm2(&m.gx).max(norm2(&m.gy)).max(norm2(&m.gz)).max(1.0);
        Residuals {
            primal,
            dual: change / scale,
        }
    }

    pub fn solve(&self, b: &Image) -> Result<SolveResult> {
        self.solve_monitored(b, b, |_| false)
    }

    /// Runs until the residual tolerance, the iteration cap, or until
    /// `stop` returns `true` for a trace record. `stop` sees every record,
    /// including the last. Trace metrics are measured on the averaged
    /// estimate against `reference`.
    pub fn solve_monitored(
        &self,
        b: &Image,
        reference: &Image,
        mut stop: impl FnMut(&TraceRecord) -> bool,
    ) -> Result<SolveResult> {
        self.shape.check_same(&b.shape())?;
        self.shape.check_same(&reference.shape())?;
        let mut state = AdalState::initial(b, self.cfg.init);
        let mut prev = state.clone();
        let mut ws = Workspace::new(self.shape.len());
        let mut trace = Vec::new();
        let mut converged = false;
        let mut estimate = state.estimate(self.shape)?;
        for iter in 1..=self.cfg.max_iters {
            prev.assign(&state);
            self.advance(&mut state, b, &mut ws);
            let res = self.residuals_with(&state, &prev, &mut ws);
            state.write_estimate(self.shape, estimate.data_mut());
            let record = TraceRecord::measure(
                iter,
                &estimate,
                b,
                reference,
                self.cfg.lambda,
                self.cfg.model,
                res.primal,
                res.dual,
            );
            trace.push(record);
            converged = res.max() <= self.cfg.tol;
            let halt = stop(&record);
            if converged || halt {
                break;
            }
        }
        Ok(SolveResult {
            u: estimate,
            iterations: trace.len(),
            trace,
            converged,
        })
    }
}

/// One anisotropic iteration from `state`.
pub fn adal_step_anisotropic(state: &AdalState, b: &Image, cfg: &SolverConfig) -> Result<AdalState> {
    let solver = AdalSolver::new(b.shape(), *cfg)?;
    let mut next = state.clone();
    solver.step_anisotropic(&mut next, b)?;
    Ok(next)
}

/// One isotropic iteration from `state`.
pub fn adal_step_isotropic(state: &AdalState, b: &Image, cfg: &SolverConfig) -> Result<AdalState> {
    let solver = AdalSolver::new(b.shape(), *cfg)?;
    let mut next = state.clone();
    solver.step_isotropic(&mut next, b)?;
    Ok(next)
}

pub fn residuals(state: &AdalState, prev: &AdalState, shape: Shape, cfg: &SolverConfig) -> Result<Residuals> {
    let solver = AdalSolver::new(shape, *cfg)?;
    state.check(shape.len())?;
    prev.check(shape.len())?;
    Ok(solver.residuals(state, prev))
}

/// Denoises `b`; trace metrics are measured against `b` itself.
pub fn solve(b: &Image, cfg: &SolverConfig) -> Result<SolveResult> {
    AdalSolver::new(b.shape(), *cfg)?.solve(b)
}

/// Denoises `b`, measuring normalized error and PSNR against `reference`.
pub fn solve_with_reference(b: &Image, reference: &Image, cfg: &SolverConfig) -> Result<SolveResult> {
    AdalSolver::new(b.shape(), *cfg)?.solve_monitored(b, reference, |_| false)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::prox;
    use rand::rngs::SmallRng;
    use rand::{Rng, SeedableRng};
    use tvadal_oracle::steps::{self as oracle, AdalVars};

    fn cfg(model: TvModel) -> SolverConfig {
        SolverConfig::defaults(model)
    }

    fn random_vec(rng: &mut SmallRng, len: usize, scale: f64) -> Vec<f64> {
        (0..len).map(|_| rng.random_range(-scale..scale)).collect()
    }

    fn random_state(rng: &mut SmallRng, len: usize) -> AdalState {
        AdalState {
            u: random_vec(rng, len, 100.0),
            v: random_vec(rng, len, 100.0),
            grad: GradientPair {
                dx: random_vec(rng, len, 20.0),
                dy: random_vec(rng, len, 20.0),
            },
            multipliers: Multipliers {
                gx: random_vec(rng, len, 10.0),
                gy: random_vec(rng, len, 10.0),
                gz: random_vec(rng, len, 10.0),
            },
        }
    }

    fn to_vars(s: &AdalState) -> AdalVars {
        AdalVars {
            u: s.u.clone(),
            v: s.v.clone(),
            dx: s.grad.dx.clone(),
            dy: s.grad.dy.clone(),
            gx: s.multipliers.gx.clone(),
            gy: s.multipliers.gy.clone(),
            gz: s.multipliers.gz.clone(),
        }
    }

    fn assert_close(a: &[f64], b: &[f64], tol: f64) {
        for (x, y) in a.iter().zip(b) {
            assert!((x - y).abs() <= tol, "{x} vs {y}");
        }
    }

    fn compare_with_oracle(model: TvModel, seed: u64, rows: usize, cols: usize) {
        let mut rng = SmallRng::seed_from_u64(seed);
        let len = rows * cols;
        let b = Image::new(rows, cols, random_vec(&mut rng, len, 255.0)).unwrap();
        let state = random_state(&mut rng, len);
        let c = cfg(model);
        let next = match model {
            TvModel::Anisotropic => adal_step_anisotropic(&state, &b, &c).unwrap(),
            TvModel::Isotropic => adal_step_isotropic(&state, &b, &c).unwrap(),
        };
        let expect = oracle::adal_step(
            rows,
            cols,
            &to_vars(&state),
            b.data(),
            c.lambda,
            c.mu1,
            c.mu2,
            model == TvModel::Isotropic,
        );
        let got = to_vars(&next);
        for (g, e) in [
            (&got.u, &expect.u),
            (&got.v, &expect.v),
            (&got.dx, &expect.dx),
            (&got.dy, &expect.dy),
            (&got.gx, &expect.gx),
            (&got.gy, &expect.gy),
            (&got.gz, &expect.gz),
        ] {
            assert_close(g, e, 1e-9);
        }
    }

    #[test]
    fn anisotropic_step_matches_dense_oracle() {
        compare_with_oracle(TvModel::Anisotropic, 11, 4, 4);
        compare_with_oracle(TvModel::Anisotropic, 12, 3, 5);
    }

    #[test]
    fn isotropic_step_matches_dense_oracle() {
        compare_with_oracle(TvModel::Isotropic, 21, 4, 4);
        compare_with_oracle(TvModel::Isotropic, 22, 5, 2);
    }

    #[test]
    fn constant_image_is_a_fixed_point() {
        let b = Image::filled(6, 5, 117.3).unwrap();
        for model in [TvModel::Anisotropic, TvModel::Isotropic] {
            let s0 = AdalState::initial(&b, InitPolicy::NoisyImage);
            let s1 = match model {
                TvModel::Anisotropic => adal_step_anisotropic(&s0, &b, &cfg(model)).unwrap(),
                TvModel::Isotropic => adal_step_isotropic(&s0, &b, &cfg(model)).unwrap(),
            };
            assert_eq!(s0, s1);
            let r = residuals(&s1, &s0, b.shape(), &cfg(model)).unwrap();
            assert_eq!((r.primal, r.dual), (0.0, 0.0));
        }
    }

    #[test]
    fn constant_image_solve_returns_input() {
        let b = Image::filled(8, 8, 42.0).unwrap();
        for model in [TvModel::Anisotropic, TvModel::Isotropic] {
            let res = solve(&b, &cfg(model)).unwrap();
            assert!(res.converged);
            assert!(res.iterations <= 2);
            assert_eq!(res.u, b);
        }
    }

    #[test]
    fn subproblems_are_solved_exactly() {
        let mut rng = SmallRng::seed_from_u64(5);
        let (rows, cols) = (7, 9);
        let shape = Shape::new(rows, cols).unwrap();
        let len = shape.len();
        let b = Image::new(rows, cols, random_vec(&mut rng, len, 255.0)).unwrap();
        let c = cfg(TvModel::Anisotropic);
        let prev = random_state(&mut rng, len);
        let next = adal_step_anisotropic(&prev, &b, &c).unwrap();
        let ratio = c.mu1 / c.mu2;

        // u system uses the new dx, new v and the old multipliers
        let col_op = DiffOperator::along_columns(shape);
        let inner: Vec<f64> = next.grad.dx.iter().zip(&prev.multipliers.gx).map(|(d, g)| d - c.mu1 * g).collect();
        let tail: Vec<f64> = next.v.iter().zip(&prev.multipliers.gz).map(|(v, g)| ratio * v - c.mu1 * g).collect();
        let dt = col_op.apply_transpose(&inner).unwrap();
        let pt = grid::apply_pt(shape, &tail).unwrap();
        let rhs: Vec<f64> = (0..len).map(|k| c.mu1 * b.data()[k] + dt[k] + pt[k]).collect();
        let sys = grid::assemble_shifted_gram(&col_op, ratio + c.mu1).unwrap();
        let lhs = sys.mul_vec(&next.u).unwrap();
        let scale = rhs.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let err = lhs.iter().zip(&rhs).fold(0.0f64, |m, (a, r)| m.max((a - r).abs()));
        assert!(err <= 1e-9 * scale, "u residual {err}");

        // v system uses the old dy, old u and old multipliers
        let row_op = DiffOperator::along_rows(shape);
        let inner: Vec<f64> = prev.grad.dy.iter().zip(&prev.multipliers.gy).map(|(d, g)| d - c.mu1 * g).collect();
        let dt = row_op.apply_transpose(&inner).unwrap();
        let pu = grid::apply_p(shape, &prev.u).unwrap();
        let rhs: Vec<f64> = (0..len).map(|k| dt[k] + c.mu1 * prev.multipliers.gz[k] + ratio * pu[k]).collect();
        let sys = grid::assemble_shifted_gram(&row_op, ratio).unwrap();
        let lhs = sys.mul_vec(&next.v).unwrap();
        let scale = rhs.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let err = lhs.iter().zip(&rhs).fold(0.0f64, |m, (a, r)| m.max((a - r).abs()));
        assert!(err <= 1e-9 * scale, "v residual {err}");

        // dx is exactly the shrinkage of D u_prev + mu1 gx
        let du = col_op.apply(&prev.u).unwrap();
        let arg: Vec<f64> = du.iter().zip(&prev.multipliers.gx).map(|(d, g)| d + c.mu1 * g).collect();
        assert_eq!(next.grad.dx, prox::soft_threshold(&arg, c.lambda * c.mu1).unwrap());
    }

    #[test]
    fn row_constant_image_gives_equal_models() {
        // each row constant: only vertical jumps, horizontal differences vanish
        let b = Image::from_fn(6, 6, |i, _| if i < 3 { 40.0 } else { 200.0 }).unwrap();
        let mut ca = cfg(TvModel::Anisotropic);
        ca.max_iters = 25;
        ca.tol = 1e-14;
        let mut ci = ca;
        ci.model = TvModel::Isotropic;
        let a = solve(&b, &ca).unwrap();
        let i = solve(&b, &ci).unwrap();
        assert_close(a.u.data(), i.u.data(), 1e-9);
        assert_eq!(a.iterations, i.iterations);
    }

    #[test]
    fn first_iteration_has_positive_primal_residual() {
        let b = Image::from_fn(5, 5, |i, j| ((i * 31 + j * 17) % 255) as f64).unwrap();
        let c = cfg(TvModel::Anisotropic);
        let s0 = AdalState::initial(&b, InitPolicy::Zero);
        let s1 = adal_step_anisotropic(&s0, &b, &c).unwrap();
        assert!(residuals(&s1, &s0, b.shape(), &c).unwrap().primal > 0.0);
    }

    #[test]
    fn residuals_are_insensitive_to_scaling() {
        let mut rng = SmallRng::seed_from_u64(77);
        let shape = Shape::new(6, 6).unwrap();
        let c = cfg(TvModel::Anisotropic);
        let b = Image::new(6, 6, random_vec(&mut rng, 36, 255.0)).unwrap();
        let s0 = AdalState::initial(&b, InitPolicy::NoisyImage);
        let s1 = adal_step_anisotropic(&s0, &b, &c).unwrap();
        let r = residuals(&s1, &s0, shape, &c).unwrap();
        let double = |s: &AdalState| AdalState {
            u: s.u.iter().map(|v| 2.0 * v).collect(),
            v: s.v.iter().map(|v| 2.0 * v).collect(),
            grad: GradientPair {
                dx: s.grad.dx.iter().map(|v| 2.0 * v).collect(),
                dy: s.grad.dy.iter().map(|v| 2.0 * v).collect(),
            },
            multipliers: Multipliers {
                gx: s.multipliers.gx.iter().map(|v| 2.0 * v).collect(),
                gy: s.multipliers.gy.iter().map(|v| 2.0 * v).collect(),
                gz: s.multipliers.gz.iter().map(|v| 2.0 * v).collect(),
            },
        };
        let r2 = residuals(&double(&s1), &double(&s0), shape, &c).unwrap();
        assert!(r2.primal >= 0.5 * r.primal && r2.primal <= 2.0 * r.primal);
    }

    #[test]
    fn rejects_invalid_config_and_shapes() {
        let b = Image::filled(3, 3, 1.0).unwrap();
        let mut c = cfg(TvModel::Anisotropic);
        c.mu1 = 0.0;
        assert!(matches!(solve(&b, &c), Err(Error::Parameter { name: "mu1", .. })));
        let mut c = cfg(TvModel::Anisotropic);
        c.max_iters = 0;
        assert!(solve(&b, &c).is_err());
        let s = AdalState::initial(&Image::filled(2, 2, 0.0).unwrap(), InitPolicy::Zero);
        assert!(adal_step_anisotropic(&s, &b, &cfg(TvModel::Anisotropic)).is_err());
    }

    #[test]
    fn trace_is_deterministic() {
        let mut rng = SmallRng::seed_from_u64(3);
        let b = Image::new(12, 10, random_vec(&mut rng, 120, 255.0)).unwrap();
        for model in [TvModel::Anisotropic, TvModel::Isotropic] {
            let a = solve(&b, &cfg(model)).unwrap();
            let c = solve(&b, &cfg(model)).unwrap();
            assert_eq!(a, c);
            assert_eq!(a.trace.len(), a.iterations);
            assert!(a.iterations <= cfg(model).max_iters);
        }
    }
}
