//! Reconstruction metrics and seeded Gaussian noise.
//!
//! Noise is drawn from `ChaCha8Rng::seed_from_u64(seed)` through
//! `rand_distr::StandardNormal`, one sample per pixel in column-major order,
//! scaled by `sigma`. The same seed always gives the same noisy image.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::image::Image;
use crate::vecops::{diff_norm2, norm2};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseSpec {
    pub sigma: f64,
    pub seed: u64,
}

impl NoiseSpec {
    pub fn new(sigma: f64, seed: u64) -> Result<Self> {
        if !(sigma >= 0.0) || !sigma.is_finite() {
            return Err(Error::Parameter {
                name: "sigma",
                reason: "must be non-negative and finite",
            });
        }
        Ok(Self { sigma, seed })
    }
}

/// `u0 + sigma * N(0, 1)` per pixel. Values are not clamped.
pub fn add_gaussian_noise(u0: &Image, spec: NoiseSpec) -> Image {
    if spec.sigma == 0.0 {
        return u0.clone();
    }
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    u0.map(|v| {
        let z: f64 = StandardNormal.sample(&mut rng);
        v + spec.sigma * z
    })
}

/// `||u - u0|| / ||u0||`.
pub fn normalized_error(u: &Image, u0: &Image) -> Result<f64> {
    u.shape().check_same(&u0.shape())?;
    let reference = norm2(u0.data());
    if reference == 0.0 {
        return Err(Error::ZeroReference);
    }
    Ok(diff_norm2(u.data(), u0.data()) / reference)
}

/// `20 log10(255 sqrt(nm) / ||u - u0||)` in dB; `+inf` when `u == u0`.
pub fn psnr(u: &Image, u0: &Image) -> Result<f64> {
    u.shape().check_same(&u0.shape())?;
    let err = diff_norm2(u.data(), u0.data());
    if err == 0.0 {
        return Ok(f64::INFINITY);
    }
    let peak = 255.0 * libm::sqrt(u.shape().len() as f64);
    Ok(20.0 * libm::log10(peak / err))
}
