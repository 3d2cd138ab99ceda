//! Row-major dense matrices as `Vec<Vec<f64>>`.

pub type Matrix = Vec<Vec<f64>>;

pub fn zeros(rows: usize, cols: usize) -> Matrix {
    vec![vec![0.0; cols]; rows]
}

pub fn identity(n: usize) -> Matrix {
    let mut m = zeros(n, n);
    for (i, row) in m.iter_mut().enumerate() {
        row[i] = 1.0;
    }
    m
}

/// Block-diagonal bidiagonal difference matrix: `runs` blocks of size
/// `run_len`, +1 on the diagonal, -1 on the super-diagonal, last row of each
/// block zero.
pub fn diff_matrix(run_len: usize, runs: usize) -> Matrix {
    let n = run_len * runs;
    let mut d = zeros(n, n);
    for b in 0..runs {
        for k in 0..run_len.saturating_sub(1) {
            let r = b * run_len + k;
            d[r][r] = 1.0;
            d[r][r + 1] = -1.0;
        }
    }
    d
}

/// Permutation taking a column-major `rows x cols` image to row-major order.
pub fn perm_matrix(rows: usize, cols: usize) -> Matrix {
    let n = rows * cols;
    let mut p = zeros(n, n);
    for i in 0..rows {
        for j in 0..cols {
            p[i * cols + j][j * rows + i] = 1.0;
        }
    }
    p
}

pub fn transpose(a: &Matrix) -> Matrix {
    let rows = a.len();
    let cols = a.first().map_or(0, Vec::len);
    let mut t = zeros(cols, rows);
    for (i, row) in a.iter().enumerate() {
        for (j, &v) in row.iter().enumerate() {
            t[j][i] = v;
        }
    }
    t
}

pub fn matmul(a: &Matrix, b: &Matrix) -> Matrix {
    let inner = b.len();
    let cols = b.first().map_or(0, Vec::len);
    let mut out = zeros(a.len(), cols);
    for (i, row) in a.iter().enumerate() {
        for k in 0..inner {
            let aik = row[k];
            if aik == 0.0 {
                continue;
            }
            for j in 0..cols {
                out[i][j] += aik * b[k][j];
            }
        }
    }
    out
}

pub fn matvec(a: &Matrix, x: &[f64]) -> Vec<f64> {
    a.iter()
        .map(|row| row.iter().zip(x).map(|(r, v)| r * v).sum())
        .collect()
}

pub fn add(a: &Matrix, b: &Matrix) -> Matrix {
    a.iter()
        .zip(b)
        .map(|(ra, rb)| ra.iter().zip(rb).map(|(x, y)| x + y).collect())
        .collect()
}

pub fn scale(a: &Matrix, s: f64) -> Matrix {
    a.iter()
        .map(|row| row.iter().map(|v| v * s).collect())
        .collect()
}

pub fn from_tridiag(lower: &[f64], diag: &[f64], upper: &[f64]) -> Matrix {
    let n = diag.len();
    let mut a = zeros(n, n);
    for i in 0..n {
        a[i][i] = diag[i];
        if i > 0 {
            a[i][i - 1] = lower[i - 1];
        }
        if i + 1 < n {
            a[i][i + 1] = upper[i];
        }
    }
    a
}

/// Gaussian elimination with partial pivoting on a full matrix.
pub fn solve_dense(a: &Matrix, b: &[f64]) -> Vec<f64> {
    let n = b.len();
    let mut m: Matrix = a.clone();
    let mut rhs = b.to_vec();
    for col in 0..n {
        let piv = (col..n)
            .max_by(|&i, &j| m[i][col].abs().total_cmp(&m[j][col].abs()))
            .unwrap();
        m.swap(col, piv);
        rhs.swap(col, piv);
        let p = m[col][col];
        assert!(p != 0.0, "singular matrix in dense oracle");
        for r in col + 1..n {
            let f = m[r][col] / p;
            if f == 0.0 {
                continue;
            }
            for c in col..n {
                m[r][c] -= f * m[col][c];
            }
            rhs[r] -= f * rhs[col];
        }
    }
    let mut x = vec![0.0; n];
    for i in (0..n).rev() {
        let s: f64 = (i + 1..n).map(|j| m[i][j] * x[j]).sum();
        x[i] = (rhs[i] - s) / m[i][i];
    }
    x
}

/// Gaussian elimination with partial pivoting for a tridiagonal matrix,
/// storing only the band (one sub-diagonal, up to two super-diagonals after
/// row swaps). Identical arithmetic to [`solve_dense`] restricted to the
/// structurally non-zero entries, so it scales to large systems.
pub fn solve_banded(lower: &[f64], diag: &[f64], upper: &[f64], b: &[f64]) -> Vec<f64> {
    let n = diag.len();
    // row i holds columns i-1..=i+2 at offsets 0..4
    let mut band = vec![[0.0f64; 4]; n];
    for i in 0..n {
        if i > 0 {
            band[i][0] = lower[i - 1];
        }
        band[i][1] = diag[i];
        if i + 1 < n {
            band[i][2] = upper[i];
        }
    }
    let at = |band: &Vec<[f64; 4]>, r: usize, c: usize| -> f64 {
        let off = c as isize - r as isize + 1;
        if (0..4).contains(&off) {
            band[r][off as usize]
        } else {
            0.0
        }
    };
    let set = |band: &mut Vec<[f64; 4]>, r: usize, c: usize, v: f64| {
        let off = c as isize - r as isize + 1;
        assert!((0..4).contains(&off), "fill-in outside band");
        band[r][off as usize] = v;
    };
    let mut rhs = b.to_vec();
    for col in 0..n {
        if col + 1 < n && at(&band, col + 1, col).abs() > at(&band, col, col).abs() {
            // swap rows col and col+1 over columns col..=col+2
            for c in col..(col + 3).min(n) {
                let a = at(&band, col, c);
                let bb = at(&band, col + 1, c);
                set(&mut band, col, c, bb);
                if c >= col {
                    set(&mut band, col + 1, c, a);
                }
            }
            rhs.swap(col, col + 1);
        }
        let p = at(&band, col, col);
        assert!(p != 0.0, "singular matrix in banded oracle");
        if col + 1 < n {
            let f = at(&band, col + 1, col) / p;
            if f != 0.0 {
                for c in col..(col + 3).min(n) {
                    let v = at(&band, col + 1, c) - f * at(&band, col, c);
                    set(&mut band, col + 1, c, v);
                }
                rhs[col + 1] -= f * rhs[col];
            }
        }
    }
    let mut x = vec![0.0; n];
    for i in (0..n).rev() {
        let mut s = rhs[i];
        for j in i + 1..(i + 3).min(n) {
            s -= at(&band, i, j) * x[j];
        }
        x[i] = s / at(&band, i, i);
    }
    x
}
