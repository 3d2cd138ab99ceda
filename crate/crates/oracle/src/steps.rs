//! One iteration of each solver carried out with explicit dense matrices.

use crate::dense::{self, Matrix};

#[derive(Debug, Clone)]
pub struct AdalVars {
    pub u: Vec<f64>,
    pub v: Vec<f64>,
    pub dx: Vec<f64>,
    pub dy: Vec<f64>,
    pub gx: Vec<f64>,
    pub gy: Vec<f64>,
    pub gz: Vec<f64>,
}

#[derive(Debug, Clone)]
pub struct SbVars {
    pub u: Vec<f64>,
    pub dx: Vec<f64>,
    pub dy: Vec<f64>,
    pub rx: Vec<f64>,
    pub ry: Vec<f64>,
}

fn soft(x: f64, t: f64) -> f64 {
    x.signum() * (x.abs() - t).max(0.0)
}

fn block_soft(a: f64, b: f64, t: f64) -> (f64, f64) {
    let n = (a * a + b * b).sqrt();
    if n <= t {
        (0.0, 0.0)
    } else {
        let s = (n - t) / n;
        (a * s, b * s)
    }
}

fn lin(terms: &[(f64, &[f64])]) -> Vec<f64> {
    let n = terms[0].1.len();
    (0..n).map(|i| terms.iter().map(|(c, v)| c * v[i]).sum()).collect()
}

struct Ops {
    dc: Matrix,
    dr: Matrix,
    p: Matrix,
    pt: Matrix,
}

impl Ops {
    fn new(rows: usize, cols: usize) -> Self {
        let p = dense::perm_matrix(rows, cols);
        Self {
            dc: dense::diff_matrix(rows, cols),
            dr: dense::diff_matrix(cols, rows),
            pt: dense::transpose(&p),
            p,
        }
    }
}

/// ADAL iteration. Isotropic shrinkage pairs `dx[k]` with the row-frame
/// `dy` entry of the same pixel.
pub fn adal_step(
    rows: usize,
    cols: usize,
    s: &AdalVars,
    b: &[f64],
    lambda: f64,
    mu1: f64,
    mu2: f64,
    isotropic: bool,
) -> AdalVars {
    let ops = Ops::new(rows, cols);
    let n = rows * cols;
    let c = mu1 / mu2;
    let dct = dense::transpose(&ops.dc);
    let drt = dense::transpose(&ops.dr);
    let eye = dense::identity(n);
    let a_u = dense::add(&dense::matmul(&dct, &ops.dc), &dense::scale(&eye, c + mu1));
    let a_v = dense::add(&dense::matmul(&drt, &ops.dr), &dense::scale(&eye, c));
    let t = lambda * mu1;

    let du = dense::matvec(&ops.dc, &s.u);
    let mut out = s.clone();
    let solve_v = |dy: &[f64], u: &[f64]| {
        let inner = lin(&[(1.0, dy), (-mu1, &s.gy)]);
        let pu = dense::matvec(&ops.p, u);
        let rhs = lin(&[(1.0, &dense::matvec(&drt, &inner)), (mu1, &s.gz), (c, &pu)]);
        dense::solve_dense(&a_v, &rhs)
    };

    if isotropic {
        let ax = lin(&[(1.0, &du), (mu1, &s.gx)]);
        let ay_row = lin(&[(1.0, &dense::matvec(&ops.dr, &s.v)), (mu1, &s.gy)]);
        let ay = dense::matvec(&ops.pt, &ay_row);
        let mut dy_col = vec![0.0; n];
        for k in 0..n {
            let (a, bb) = block_soft(ax[k], ay[k], t);
            out.dx[k] = a;
            dy_col[k] = bb;
        }
        out.dy = dense::matvec(&ops.p, &dy_col);
        out.v = solve_v(&out.dy, &s.u);
    } else {
        out.dx = du.iter().zip(&s.gx).map(|(d, g)| soft(d + mu1 * g, t)).collect();
        out.v = solve_v(&s.dy, &s.u);
        let dv = dense::matvec(&ops.dr, &out.v);
        out.dy = dv.iter().zip(&s.gy).map(|(d, g)| soft(d + mu1 * g, t)).collect();
    }

    let inner = lin(&[(1.0, &out.dx), (-mu1, &s.gx)]);
    let tail = dense::matvec(&ops.pt, &lin(&[(c, &out.v), (-mu1, &s.gz)]));
    let rhs = lin(&[(mu1, b), (1.0, &dense::matvec(&dct, &inner)), (1.0, &tail)]);
    out.u = dense::solve_dense(&a_u, &rhs);

    let du = dense::matvec(&ops.dc, &out.u);
    let dv = dense::matvec(&ops.dr, &out.v);
    let pu = dense::matvec(&ops.p, &out.u);
    out.gx = lin(&[(1.0, &s.gx), (1.0 / mu1, &du), (-1.0 / mu1, &out.dx)]);
    out.gy = lin(&[(1.0, &s.gy), (1.0 / mu1, &dv), (-1.0 / mu1, &out.dy)]);
    out.gz = lin(&[(1.0, &s.gz), (1.0 / mu2, &pu), (-1.0 / mu2, &out.v)]);
    out
}

/// The split Bregman system matrix `mu I + Gx^T Gx + Gy^T Gy` in the
/// column-major frame, with `Gy = P^T D_row P`.
pub fn sb_matrix(rows: usize, cols: usize, mu: f64) -> (Matrix, Matrix, Matrix) {
    let ops = Ops::new(rows, cols);
    let gy = dense::matmul(&ops.pt, &dense::matmul(&ops.dr, &ops.p));
    let gx = ops.dc;
    let lap = dense::add(
        &dense::matmul(&dense::transpose(&gx), &gx),
        &dense::matmul(&dense::transpose(&gy), &gy),
    );
    let a = dense::add(&lap, &dense::scale(&dense::identity(rows * cols), mu));
    (a, gx, gy)
}

pub fn sb_rhs(gx: &Matrix, gy: &Matrix, s: &SbVars, b: &[f64], mu: f64) -> Vec<f64> {
    let tx = dense::matvec(&dense::transpose(gx), &lin(&[(1.0, &s.dx), (-1.0, &s.rx)]));
    let ty = dense::matvec(&dense::transpose(gy), &lin(&[(1.0, &s.dy), (-1.0, &s.ry)]));
    lin(&[(mu, b), (1.0, &tx), (1.0, &ty)])
}

/// Lexicographic Gauss-Seidel on a dense matrix.
pub fn gauss_seidel(a: &Matrix, rhs: &[f64], x0: &[f64], cycles: usize) -> Vec<f64> {
    let mut x = x0.to_vec();
    for _ in 0..cycles {
        for i in 0..x.len() {
            let off: f64 = (0..x.len()).filter(|&j| j != i).map(|j| a[i][j] * x[j]).sum();
            x[i] = (rhs[i] - off) / a[i][i];
        }
    }
    x
}

pub fn sb_step(
    rows: usize,
    cols: usize,
    s: &SbVars,
    b: &[f64],
    lambda: f64,
    mu: f64,
    sweeps: usize,
    isotropic: bool,
) -> SbVars {
    let (a, gx, gy) = sb_matrix(rows, cols, mu);
    let rhs = sb_rhs(&gx, &gy, s, b, mu);
    let u = gauss_seidel(&a, &rhs, &s.u, sweeps);
    let ax = lin(&[(1.0, &dense::matvec(&gx, &u)), (1.0, &s.rx)]);
    let ay = lin(&[(1.0, &dense::matvec(&gy, &u)), (1.0, &s.ry)]);
    let t = lambda * mu;
    let n = u.len();
    let (mut dx, mut dy) = (vec![0.0; n], vec![0.0; n]);
    for k in 0..n {
        if isotropic {
            (dx[k], dy[k]) = block_soft(ax[k], ay[k], t);
        } else {
            dx[k] = soft(ax[k], t);
            dy[k] = soft(ay[k], t);
        }
    }
    let gu_x = dense::matvec(&gx, &u);
    let gu_y = dense::matvec(&gy, &u);
    SbVars {
        rx: lin(&[(1.0, &s.rx), (1.0, &gu_x), (-1.0, &dx)]),
        ry: lin(&[(1.0, &s.ry), (1.0, &gu_y), (-1.0, &dy)]),
        u,
        dx,
        dy,
    }
}
