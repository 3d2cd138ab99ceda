//! Independent ROF solver: accelerated projected gradient on the dual.
//!
//! Uses forward differences written directly in pixel-index form
//! (`u[k+1] - u[k]` down a column, `u[k+rows] - u[k]` along a row, zero at
//! the far border). The sign is opposite to the library's operator, which
//! does not change any TV value. The duality gap certifies accuracy.

pub struct RofSolution {
    pub u: Vec<f64>,
    pub primal: f64,
    pub gap: f64,
    pub iterations: usize,
}

fn grad(rows: usize, cols: usize, u: &[f64], gx: &mut [f64], gy: &mut [f64]) {
    for j in 0..cols {
        for i in 0..rows {
            let k = j * rows + i;
            gx[k] = if i + 1 < rows { u[k + 1] - u[k] } else { 0.0 };
            gy[k] = if j + 1 < cols { u[k + rows] - u[k] } else { 0.0 };
        }
    }
}

fn grad_adjoint(rows: usize, cols: usize, px: &[f64], py: &[f64], out: &mut [f64]) {
    out.iter_mut().for_each(|v| *v = 0.0);
    for j in 0..cols {
        for i in 0..rows {
            let k = j * rows + i;
            if i + 1 < rows {
                out[k + 1] += px[k];
                out[k] -= px[k];
            }
            if j + 1 < cols {
                out[k + rows] += py[k];
                out[k] -= py[k];
            }
        }
    }
}

pub fn tv(rows: usize, cols: usize, u: &[f64], isotropic: bool) -> f64 {
    let mut gx = vec![0.0; u.len()];
    let mut gy = vec![0.0; u.len()];
    grad(rows, cols, u, &mut gx, &mut gy);
    gx.iter()
        .zip(&gy)
        .map(|(a, b)| {
            if isotropic {
                (a * a + b * b).sqrt()
            } else {
                a.abs() + b.abs()
            }
        })
        .sum()
}

pub fn objective(rows: usize, cols: usize, u: &[f64], b: &[f64], lambda: f64, isotropic: bool) -> f64 {
    let fid: f64 = u.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum();
    lambda * tv(rows, cols, u, isotropic) + 0.5 * fid
}

fn project(px: &mut [f64], py: &mut [f64], isotropic: bool) {
    for (a, b) in px.iter_mut().zip(py.iter_mut()) {
        if isotropic {
            let n = (*a * *a + *b * *b).sqrt();
            if n > 1.0 {
                *a /= n;
                *b /= n;
            }
        } else {
            *a = a.clamp(-1.0, 1.0);
            *b = b.clamp(-1.0, 1.0);
        }
    }
}

/// Runs until the relative duality gap is below `rel_gap` or `max_iters`.
pub fn solve(
    rows: usize,
    cols: usize,
    b: &[f64],
    lambda: f64,
    isotropic: bool,
    rel_gap: f64,
    max_iters: usize,
) -> RofSolution {
    let len = rows * cols;
    let b_sq: f64 = b.iter().map(|v| v * v).sum();
    let mut px = vec![0.0; len];
    let mut py = vec![0.0; len];
    let mut yx = px.clone();
    let mut yy = py.clone();
    let mut u = vec![0.0; len];
    let mut kt = vec![0.0; len];
    let mut gx = vec![0.0; len];
    let mut gy = vec![0.0; len];
    let step = 1.0 / (8.0 * lambda);
    let mut t = 1.0f64;
    let mut prev_dual = f64::NEG_INFINITY;
    let mut result = None;

    let primal_dual = |px: &[f64], py: &[f64], u: &mut [f64], kt: &mut [f64]| {
        grad_adjoint(rows, cols, px, py, kt);
        for k in 0..len {
            u[k] = b[k] - lambda * kt[k];
        }
        let r_sq: f64 = u.iter().map(|v| v * v).sum();
        let dual = 0.5 * b_sq - 0.5 * r_sq;
        let primal = objective(rows, cols, u, b, lambda, isotropic);
        (primal, dual)
    };

    for it in 1..=max_iters {
        // gradient step at the extrapolated point
        grad_adjoint(rows, cols, &yx, &yy, &mut kt);
        for k in 0..len {
            u[k] = b[k] - lambda * kt[k];
        }
        grad(rows, cols, &u, &mut gx, &mut gy);
        let mut nx: Vec<f64> = yx.iter().zip(&gx).map(|(p, g)| p + step * g).collect();
        let mut ny: Vec<f64> = yy.iter().zip(&gy).map(|(p, g)| p + step * g).collect();
        project(&mut nx, &mut ny, isotropic);

        let t_next = 0.5 * (1.0 + (1.0 + 4.0 * t * t).sqrt());
        let (primal, dual) = primal_dual(&nx, &ny, &mut u, &mut kt);
        if dual < prev_dual {
            // adaptive restart
            t = 1.0;
            yx.copy_from_slice(&px);
            yy.copy_from_slice(&py);
            continue;
        }
        let beta = (t - 1.0) / t_next;
        for k in 0..len {
            yx[k] = nx[k] + beta * (nx[k] - px[k]);
            yy[k] = ny[k] + beta * (ny[k] - py[k]);
        }
        px = nx;
        py = ny;
        t = t_next;
        prev_dual = dual;
        let gap = primal - dual;
        if gap <= rel_gap * primal.abs().max(1.0) || it == max_iters {
            result = Some(RofSolution {
                u: u.clone(),
                primal,
                gap,
                iterations: it,
            });
            break;
        }
    }
    result.unwrap_or_else(|| {
        let (primal, dual) = primal_dual(&px, &py, &mut u, &mut kt);
        RofSolution {
            u,
            primal,
            gap: primal - dual,
            iterations: max_iters,
        }
    })
}
