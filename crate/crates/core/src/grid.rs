//! Discrete difference operators, the column/row-major permutation, and
//! tridiagonal solves.
//!
//! The forward difference `D` acts on a vector made of `runs` consecutive
//! runs of `run_len` samples. Inside a run `(Dx)_k = x_k - x_{k+1}` and the
//! last entry of every run is zero (Neumann boundary), so runs never mix and
//! `D^T D` is tridiagonal. On a column-major image `D` with runs along the
//! columns differentiates down each column; on the row-major copy `v = Pu` it
//! differentiates along each row.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{check_len, Error, Result};
use crate::image::Shape;

/// Block-diagonal forward difference with a zero last row per block.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DiffOperator {
    pub run_len: usize,
    pub runs: usize,
}

impl DiffOperator {
    pub fn new(run_len: usize, runs: usize) -> Result<Self> {
        if run_len == 0 || runs == 0 {
            return Err(Error::Parameter {
                name: "run_len/runs",
                reason: "must be positive",
            });
        }
        Ok(Self { run_len, runs })
    }

    /// Differences down the columns of a column-major image.
    pub fn along_columns(shape: Shape) -> Self {
        Self {
            run_len: shape.rows,
            runs: shape.cols,
        }
    }

    /// Differences along the rows of a row-major image.
    pub fn along_rows(shape: Shape) -> Self {
        Self {
            run_len: shape.cols,
            runs: shape.rows,
        }
    }

    pub fn len(&self) -> usize {
        self.run_len * self.runs
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn apply(&self, x: &[f64]) -> Result<Vec<f64>> {
        check_len(self.len(), x.len())?;
        let mut out = vec![0.0; x.len()];
        self.apply_into(x, &mut out);
        Ok(out)
    }

    pub fn apply_transpose(&self, y: &[f64]) -> Result<Vec<f64>> {
        check_len(self.len(), y.len())?;
        let mut out = vec![0.0; y.len()];
        self.apply_transpose_into(y, &mut out);
        Ok(out)
    }

    /// `out = D x`. Lengths must already match.
    pub(crate) fn apply_into(&self, x: &[f64], out: &mut [f64]) {
        let n = self.run_len;
        for (xs, os) in x.chunks_exact(n).zip(out.chunks_exact_mut(n)) {
            for k in 0..n - 1 {
                os[k] = xs[k] - xs[k + 1];
            }
            os[n - 1] = 0.0;
        }
    }

    /// `out = D^T y`. The last entry of each run of `y` is ignored.
    pub(crate) fn apply_transpose_into(&self, y: &[f64], out: &mut [f64]) {
        let n = self.run_len;
        for (ys, os) in y.chunks_exact(n).zip(out.chunks_exact_mut(n)) {
            if n == 1 {
                os[0] = 0.0;
                continue;
            }
            os[0] = ys[0];
            for k in 1..n - 1 {
                os[k] = ys[k] - ys[k - 1];
            }
            os[n - 1] = -ys[n - 2];
        }
    }
}

/// `D x` for the given operator.
pub fn apply_d(op: &DiffOperator, x: &[f64]) -> Result<Vec<f64>> {
    op.apply(x)
}

/// `D^T y`, the exact adjoint of [`apply_d`].
pub fn apply_dt(op: &DiffOperator, y: &[f64]) -> Result<Vec<f64>> {
    op.apply_transpose(y)
}

/// Reorders a column-major vector into row-major order (`v = P u`).
pub fn apply_p(shape: Shape, x: &[f64]) -> Result<Vec<f64>> {
    check_len(shape.len(), x.len())?;
    let mut out = vec![0.0; x.len()];
    permute_into(shape, x, &mut out);
    Ok(out)
}

/// Reorders a row-major vector back into column-major order (`u = P^T v`).
pub fn apply_pt(shape: Shape, y: &[f64]) -> Result<Vec<f64>> {
    check_len(shape.len(), y.len())?;
    let mut out = vec![0.0; y.len()];
    permute_transpose_into(shape, y, &mut out);
    Ok(out)
}

pub(crate) fn permute_into(shape: Shape, x: &[f64], out: &mut [f64]) {
    transpose(x, out, shape.rows, shape.cols);
}

pub(crate) fn permute_transpose_into(shape: Shape, y: &[f64], out: &mut [f64]) {
    transpose(y, out, shape.cols, shape.rows);
}

/// `out[i * cols + j] = x[j * rows + i]`, in tiles to stay cache friendly.
fn transpose(x: &[f64], out: &mut [f64], rows: usize, cols: usize) {
    const TILE: usize = 32;
    for j0 in (0..cols).step_by(TILE) {
        for i0 in (0..rows).step_by(TILE) {
            for j in j0..(j0 + TILE).min(cols) {
                for i in i0..(i0 + TILE).min(rows) {
                    out[i * cols + j] = x[j * rows + i];
                }
            }
        }
    }
}

/// Calls `f((D u)_k, (P^T D P u)_k)` for every pixel `k` in column-major
/// order, without materializing either vector.
pub(crate) fn for_each_gradient(shape: Shape, u: &[f64], mut f: impl FnMut(f64, f64)) {
    let (n, m) = (shape.rows, shape.cols);
    for j in 0..m {
        for i in 0..n {
            let k = j * n + i;
            let gx = if i + 1 < n { u[k] - u[k + 1] } else { 0.0 };
            let gy = if j + 1 < m { u[k] - u[k + n] } else { 0.0 };
            f(gx, gy);
        }
    }
}

/// Row-direction differences expressed in the column-major frame,
/// i.e. `P^T D P u` computed directly on `u`.
pub(crate) fn row_diff_col_frame_into(shape: Shape, u: &[f64], out: &mut [f64]) {
    let n = shape.rows;
    let split = n * (shape.cols - 1);
    for k in 0..split {
        out[k] = u[k] - u[k + n];
    }
    out[split..].fill(0.0);
}

/// Adjoint of [`row_diff_col_frame_into`].
pub(crate) fn row_diff_col_frame_transpose_into(shape: Shape, y: &[f64], out: &mut [f64]) {
    let n = shape.rows;
    let m = shape.cols;
    if m == 1 {
        out.fill(0.0);
        return;
    }
    out[..n].copy_from_slice(&y[..n]);
    for k in n..n * (m - 1) {
        out[k] = y[k] - y[k - n];
    }
    for k in n * (m - 1)..n * m {
        out[k] = -y[k - n];
    }
}

/// A tridiagonal matrix stored by its three diagonals.
#[derive(Debug, Clone, PartialEq)]
pub struct TridiagSystem {
    pub lower: Vec<f64>,
    pub diag: Vec<f64>,
    pub upper: Vec<f64>,
}

impl TridiagSystem {
    pub fn new(lower: Vec<f64>, diag: Vec<f64>, upper: Vec<f64>) -> Result<Self> {
        if diag.is_empty() {
            return Err(Error::Parameter {
                name: "diag",
                reason: "system must have at least one row",
            });
        }
        check_len(diag.len() - 1, lower.len())?;
        check_len(diag.len() - 1, upper.len())?;
        Ok(Self { lower, diag, upper })
    }

    pub fn len(&self) -> usize {
        self.diag.len()
    }

    pub fn is_empty(&self) -> bool {
        self.diag.is_empty()
    }

    /// `A x`.
    pub fn mul_vec(&self, x: &[f64]) -> Result<Vec<f64>> {
        let n = self.len();
        check_len(n, x.len())?;
        let mut out = Vec::with_capacity(n);
        for i in 0..n {
            let mut acc = self.diag[i] * x[i];
            if i > 0 {
                acc += self.lower[i - 1] * x[i - 1];
            }
            if i + 1 < n {
                acc += self.upper[i] * x[i + 1];
            }
            out.push(acc);
        }
        Ok(out)
    }

    /// LU-factorizes the system without pivoting.
    pub fn factor(&self) -> Result<ThomasFactor> {
        let n = self.len();
        let mut inv_pivot = Vec::with_capacity(n);
        let mut upper_scaled = Vec::with_capacity(n.saturating_sub(1));
        let mut prev_c = 0.0;
        for i in 0..n {
            let a = if i > 0 { self.lower[i - 1] } else { 0.0 };
            let c = if i + 1 < n { self.upper[i] } else { 0.0 };
            let pivot = self.diag[i] - a * prev_c;
            let scale = libm::fabs(a) + libm::fabs(self.diag[i]) + libm::fabs(c);
            if !(libm::fabs(pivot) > 1e-14 * scale) {
                return Err(Error::SingularPivot { row: i });
            }
            let inv = 1.0 / pivot;
            inv_pivot.push(inv);
            if i + 1 < n {
                prev_c = c * inv;
                upper_scaled.push(prev_c);
            }
        }
        Ok(ThomasFactor {
            lower: self.lower.clone(),
            inv_pivot,
            upper_scaled,
        })
    }
}

/// Precomputed Thomas-algorithm elimination for a fixed tridiagonal matrix.
///
/// Solving costs one forward and one backward pass over the system.
#[derive(Debug, Clone)]
pub struct ThomasFactor {
    lower: Vec<f64>,
    inv_pivot: Vec<f64>,
    upper_scaled: Vec<f64>,
}

impl ThomasFactor {
    pub fn len(&self) -> usize {
        self.inv_pivot.len()
    }

    pub fn is_empty(&self) -> bool {
        self.inv_pivot.is_empty()
    }

    pub fn solve(&self, rhs: &[f64]) -> Result<Vec<f64>> {
        check_len(self.len(), rhs.len())?;
        let mut x = rhs.to_vec();
        self.solve_in_place(&mut x);
        Ok(x)
    }

    /// Overwrites `x` (holding the right-hand side) with the solution.
    pub(crate) fn solve_in_place(&self, x: &mut [f64]) {
        let n = x.len();
        x[0] *= self.inv_pivot[0];
        for i in 1..n {
            x[i] = (x[i] - self.lower[i - 1] * x[i - 1]) * self.inv_pivot[i];
        }
        for i in (0..n - 1).rev() {
            x[i] -= self.upper_scaled[i] * x[i + 1];
        }
    }

    /// Solves the same system independently for every consecutive chunk of
    /// `self.len()` entries of `x`. Four chunks are eliminated in lockstep so
    /// their dependency chains overlap; the arithmetic per chunk is unchanged.
    pub(crate) fn solve_runs_in_place(&self, x: &mut [f64]) {
        const LANES: usize = 4;
        let n = self.len();
        let mut blocks = x.chunks_exact_mut(LANES * n);
        for block in &mut blocks {
            for r in 0..LANES {
                block[r * n] *= self.inv_pivot[0];
            }
            for i in 1..n {
                let (l, p) = (self.lower[i - 1], self.inv_pivot[i]);
                for r in 0..LANES {
                    let k = r * n + i;
                    block[k] = (block[k] - l * block[k - 1]) * p;
                }
            }
            for i in (0..n - 1).rev() {
                let c = self.upper_scaled[i];
                for r in 0..LANES {
                    let k = r * n + i;
                    block[k] -= c * block[k + 1];
                }
            }
        }
        for run in blocks.into_remainder().chunks_exact_mut(n) {
            self.solve_in_place(run);
        }
    }
}

/// Tridiagonal form of `D^T D + shift * I`.
pub fn assemble_shifted_gram(op: &DiffOperator, shift: f64) -> Result<TridiagSystem> {
    if !(shift > 0.0) || !shift.is_finite() {
        return Err(Error::Parameter {
            name: "shift",
            reason: "must be positive and finite",
        });
    }
    let len = op.len();
    let n = op.run_len;
    let mut diag = Vec::with_capacity(len);
    let mut off = Vec::with_capacity(len - 1);
    for _ in 0..op.runs {
        for k in 0..n {
            let gram = if n == 1 {
                0.0
            } else if k == 0 || k == n - 1 {
                1.0
            } else {
                2.0
            };
            diag.push(gram + shift);
        }
        for _ in 0..n - 1 {
            off.push(-1.0);
        }
        // no coupling across the run boundary
        off.push(0.0);
    }
    off.truncate(len - 1);
    TridiagSystem::new(off.clone(), diag, off)
}

/// Solves `A x = rhs` with the Thomas algorithm (no pivoting).
pub fn thomas_solve(sys: &TridiagSystem, rhs: &[f64]) -> Result<Vec<f64>> {
    check_len(sys.len(), rhs.len())?;
    sys.factor()?.solve(rhs)
}
