//! Total-variation (ROF) image denoising.
//!
//! Solves `min_u lambda * TV(u) + 1/2 ||u - b||^2` for anisotropic and
//! isotropic TV with two families of splitting methods:
//!
//! - [`adal`]: an alternating direction augmented Lagrangian method that
//!   splits the image into a column-major copy `u` and a row-major copy
//!   `v = Pu`, so that both quadratic subproblems are tridiagonal and are
//!   solved exactly with the Thomas algorithm.
//! - [`bregman`]: the split Bregman baseline, whose Laplacian subproblem is
//!   solved inexactly by a fixed number of Gauss-Seidel sweeps.
//!
//! Images are stored column-major (see [`Image`]). The crate is `no_std` and
//! only needs `alloc`; file formats and the command line live in the
//! `tvadal` companion crate.

#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod adal;
pub mod bregman;
mod error;
pub mod grid;
mod image;
pub mod metrics;
pub mod prox;
mod trace;
mod vecops;

pub use error::{Error, Result};
pub use image::{Image, Shape};
pub use trace::{SolveResult, TraceRecord};
pub use prox::TvModel;
