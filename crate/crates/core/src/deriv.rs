//! First derivatives of uniformly sampled data along the log-radial axis.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fft::Fft;

/// Derivative scheme along s.
///
/// The centered schemes switch to one-sided stencils of the same width at
/// the grid ends, so they are exact on polynomials of degree below the
/// stencil width everywhere on the grid.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DerivativeScheme {
    Central4,
    #[default]
    Central8,
    /// Discrete Fourier derivative; assumes grid-periodic data.
    Spectral,
}

impl DerivativeScheme {
    /// Number of grid points the stencil touches.
    pub fn stencil_width(self) -> usize {
        match self {
            DerivativeScheme::Central4 => 5,
            DerivativeScheme::Central8 => 9,
            DerivativeScheme::Spectral => 2,
        }
    }

    fn interior(self) -> &'static [f64] {
        match self {
            DerivativeScheme::Central4 => &[2.0 / 3.0, -1.0 / 12.0],
            DerivativeScheme::Central8 => &[4.0 / 5.0, -1.0 / 5.0, 4.0 / 105.0, -1.0 / 280.0],
            DerivativeScheme::Spectral => &[],
        }
    }
}

/// Finite-difference weights for the first derivative at `x0` from samples at
/// `nodes` (Fornberg's recursion).
pub fn fornberg_weights(x0: f64, nodes: &[f64]) -> Vec<f64> {
    let n = nodes.len();
    // c[j][k]: weight of node j for derivative order k (k = 0, 1)
    let mut c = vec![[0.0f64; 2]; n];
    c[0][0] = 1.0;
    let mut c1 = 1.0;
    let mut c4 = nodes[0] - x0;
    for i in 1..n {
        let mn = i.min(1);
        let mut c2 = 1.0;
        let c5 = c4;
        c4 = nodes[i] - x0;
        for j in 0..i {
            let c3 = nodes[i] - nodes[j];
            c2 *= c3;
            if j == i - 1 {
                for k in (1..=mn).rev() {
                    c[i][k] = c1 * (k as f64 * c[i - 1][k - 1] - c5 * c[i - 1][k]) / c2;
                }
                c[i][0] = -c1 * c5 * c[i - 1][0] / c2;
            }
            for k in (1..=mn).rev() {
                c[j][k] = (c4 * c[j][k] - k as f64 * c[j][k - 1]) / c3;
            }
            c[j][0] = c4 * c[j][0] / c3;
        }
        c1 = c2;
    }
    c.iter().map(|w| w[1]).collect()
}

/// Reusable derivative operator for one grid length and spacing.
#[derive(Clone, Debug)]
pub struct Differentiator {
    scheme: DerivativeScheme,
    len: usize,
    spacing: f64,
    /// One-sided weights for the first `half` rows; the last rows mirror them.
    edge: Vec<Vec<f64>>,
    fft: Option<Fft>,
}

impl Differentiator {
    pub fn new(scheme: DerivativeScheme, len: usize, spacing: f64) -> Result<Self> {
        let needed = scheme.stencil_width();
        if len < needed {
            return Err(Error::GridTooCoarse { count: len, needed });
        }
        let (edge, fft) = match scheme {
            DerivativeScheme::Spectral => (Vec::new(), Some(Fft::new(len))),
            _ => {
                let width = needed;
                let half = width / 2;
                let nodes: Vec<f64> = (0..width).map(|k| k as f64).collect();
                let edge = (0..half).map(|i| fornberg_weights(i as f64, &nodes)).collect();
                (edge, None)
            }
        };
        Ok(Self {
            scheme,
            len,
            spacing,
            edge,
            fft,
        })
    }

    pub fn scheme(&self) -> DerivativeScheme {
        self.scheme
    }

    /// d/ds of `values`, written into `out`.
    pub fn apply_into(&self, values: &[Complex64], out: &mut [Complex64]) {
        assert_eq!(values.len(), self.len);
        assert_eq!(out.len(), self.len);
        let n = self.len;
        let inv_h = 1.0 / self.spacing;
        if let Some(fft) = &self.fft {
            out.copy_from_slice(values);
            fft.forward(out);
            let base = 2.0 * PI / (n as f64 * self.spacing);
            for (k, z) in out.iter_mut().enumerate() {
                let signed = if 2 * k < n { k as f64 } else { k as f64 - n as f64 };
                let wave = if n % 2 == 0 && 2 * k == n { 0.0 } else { signed * base };
                *z *= Complex64::new(0.0, wave / n as f64);
            }
            fft.inverse(out);
            return;
        }
        let coeffs = self.scheme.interior();
        let half = coeffs.len();
        for i in half..n - half {
            let mut acc = Complex64::new(0.0, 0.0);
            for (k, c) in coeffs.iter().enumerate() {
                acc += (values[i + k + 1] - values[i - k - 1]) * *c;
            }
            out[i] = acc * inv_h;
        }
        let width = 2 * half + 1;
        for (i, weights) in self.edge.iter().enumerate() {
            let mut left = Complex64::new(0.0, 0.0);
            let mut right = Complex64::new(0.0, 0.0);
            for (k, w) in weights.iter().enumerate() {
                left += values[k] * *w;
                // mirrored stencil: reflect nodes and flip the sign of d/ds
                right -= values[n - 1 - k] * *w;
            }
            out[i] = left * inv_h;
            out[n - 1 - i] = right * inv_h;
            debug_assert_eq!(weights.len(), width);
        }
    }

    pub fn apply(&self, values: &[Complex64]) -> Vec<Complex64> {
        let mut out = vec![Complex64::new(0.0, 0.0); values.len()];
        self.apply_into(values, &mut out);
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fornberg_reproduces_central_weights() {
        let nodes = [-2.0, -1.0, 0.0, 1.0, 2.0];
        let w = fornberg_weights(0.0, &nodes);
        let expected = [1.0 / 12.0, -2.0 / 3.0, 0.0, 2.0 / 3.0, -1.0 / 12.0];
        for (a, b) in w.iter().zip(expected) {
            assert!((a - b).abs() < 1e-14);
        }
    }

    #[test]
    fn exact_on_low_degree_polynomials() {
        let n = 40;
        let h = 0.1;
        for scheme in [DerivativeScheme::Central4, DerivativeScheme::Central8] {
            let degree = scheme.stencil_width() as i32 - 1;
            let d = Differentiator::new(scheme, n, h).unwrap();
            let values: Vec<Complex64> = (0..n)
                .map(|i| Complex64::new((i as f64 * h - 1.0).powi(degree), 0.0))
                .collect();
            let out = d.apply(&values);
            for (i, z) in out.iter().enumerate() {
                let s = i as f64 * h - 1.0;
                let exact = degree as f64 * s.powi(degree - 1);
                assert!((z.re - exact).abs() < 1e-8 * (1.0 + exact.abs()), "{scheme:?} at {i}");
            }
        }
    }

    #[test]
    fn too_short_grid_is_rejected() {
        assert_eq!(
            Differentiator::new(DerivativeScheme::Central8, 8, 0.1).unwrap_err(),
            Error::GridTooCoarse { count: 8, needed: 9 }
        );
    }
}
