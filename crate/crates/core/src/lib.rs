//! Log-radial coordinates on ℝⁿ, the dilation group and its generator, the
//! Gaussian semigroup e^{-tA²}, the Mellin transform, and a certifier for
//! Hardy and Sobolev type inequalities built on them.
//!
//! The crate is `no_std` and needs only `alloc`.

#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod deriv;
pub mod error;
pub mod fft;
pub mod field;
pub mod gradient;
pub mod grid;
pub mod inequalities;
pub mod extremal;
pub mod mellin;
pub mod norms;
pub mod optimize;
pub mod semigroup;
pub mod special;
pub mod sphere;

pub use num_complex::Complex64;

pub use error::{Error, Result};
