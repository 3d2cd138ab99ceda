//! Shrinkage operators and TV / ROF objective evaluation.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{check_len, Error, Result};
use crate::grid;
use crate::image::Image;

/// Which total-variation norm is regularized.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TvModel {
    /// Sum of absolute horizontal and vertical differences.
    Anisotropic,
    /// Sum of per-pixel Euclidean gradient norms.
    Isotropic,
}

/// Auxiliary gradient variables. `dx` is in the column-major frame of `u`,
/// `dy` in the row-major frame of `v = Pu`.
#[derive(Debug, Clone, PartialEq)]
pub struct GradientPair {
    pub dx: Vec<f64>,
    pub dy: Vec<f64>,
}

impl GradientPair {
    pub fn zeros(len: usize) -> Self {
        Self {
            dx: vec![0.0; len],
            dy: vec![0.0; len],
        }
    }
}

fn check_threshold(t: f64) -> Result<()> {
    if t >= 0.0 && t.is_finite() {
        Ok(())
    } else {
        Err(Error::Parameter {
            name: "threshold",
            reason: "must be non-negative and finite",
        })
    }
}

#[inline]
pub(crate) fn shrink(x: f64, t: f64) -> f64 {
    if x > t {
        x - t
    } else if x < -t {
        x + t
    } else {
        0.0
    }
}

/// `sqrt(a^2 + b^2)`, falling back to `hypot` when the squares over- or underflow.
#[inline]
pub(crate) fn norm_2d(a: f64, b: f64) -> f64 {
    let sq = a * a + b * b;
    if sq.is_finite() && sq >= f64::MIN_POSITIVE {
        libm::sqrt(sq)
    } else {
        libm::hypot(a, b)
    }
}

/// Scales `(a, b)` to norm `max(||(a, b)|| - t, 0)`; the zero block stays zero.
#[inline]
pub(crate) fn shrink_block(a: f64, b: f64, t: f64) -> (f64, f64) {
    let norm = norm_2d(a, b);
    if norm <= t {
        (0.0, 0.0)
    } else {
        let s = (norm - t) / norm;
        (a * s, b * s)
    }
}

/// Componentwise `max(|x_i| - t, 0) * sign(x_i)`.
pub fn soft_threshold(x: &[f64], t: f64) -> Result<Vec<f64>> {
    check_threshold(t)?;
    Ok(x.iter().map(|&v| shrink(v, t)).collect())
}

/// Proximal map of `t * sum_i ||(dx_i, dy_i)||`, applied blockwise.
pub fn block_soft_threshold(dx_in: &[f64], dy_in: &[f64], t: f64) -> Result<GradientPair> {
    check_threshold(t)?;
    check_len(dx_in.len(), dy_in.len())?;
    let (dx, dy) = dx_in
        .iter()
        .zip(dy_in)
        .map(|(&a, &b)| shrink_block(a, b, t))
        .unzip();
    Ok(GradientPair { dx, dy })
}

/// `||D u||_1 + ||D (P u)||_1`.
pub fn tv_anisotropic(u: &Image) -> f64 {
    let mut sum = 0.0;
    grid::for_each_gradient(u.shape(), u.data(), |gx, gy| sum += libm::fabs(gx) + libm::fabs(gy));
    sum
}

/// `sum_i sqrt((Du)_i^2 + (P^T D P u)_i^2)`.
pub fn tv_isotropic(u: &Image) -> f64 {
    let mut sum = 0.0;
    grid::for_each_gradient(u.shape(), u.data(), |gx, gy| sum += norm_2d(gx, gy));
    sum
}

pub fn tv(u: &Image, model: TvModel) -> f64 {
    match model {
        TvModel::Anisotropic => tv_anisotropic(u),
        TvModel::Isotropic => tv_isotropic(u),
    }
}

/// ROF objective `lambda * TV(u) + 1/2 ||u - b||^2`.
pub fn objective(u: &Image, b: &Image, lambda: f64, model: TvModel) -> Result<f64> {
    u.shape().check_same(&b.shape())?;
    let fidelity: f64 = u
        .data()
        .iter()
        .zip(b.data())
        .map(|(x, y)| (x - y) * (x - y))
        .sum();
    Ok(lambda * tv(u, model) + 0.5 * fidelity)
}
