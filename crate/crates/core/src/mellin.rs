//! M = 𝓕 ∘ Φ: the Fourier transform in s of Φf, with the symmetric
//! 1/√(2π) convention, (Mψ)(τ, ω) = (2π)^{-1/2} ∫ e^{-iτs} (Φψ)(s, ω) ds.
//!
//! On a grid of N points with spacing h the frequencies are
//! τ_k = 2π(k − ⌊N/2⌋)/(N h), k = 0..N, in ascending order.

use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;
use num_complex::Complex64;
#[allow(unused_imports)] // float methods are inherent once std is linked
use num_traits::Float;

use crate::deriv::DerivativeScheme;
use crate::error::{Error, Result};
use crate::fft::Fft;
use crate::field::{apply_a, dilate, phi_forward, phi_inverse, LogField, RadialProfile, ScalarField};
use crate::grid::LogRadialGrid;
use crate::semigroup::{evolve, SemigroupQuery};
use crate::sphere::SphericalQuadrature;

/// Fraction of the Nyquist frequency inside which diagonalization checks run.
pub const RESOLVED_FRACTION: f64 = 0.5;

/// Mellin samples, node-major like the fields they come from.
#[derive(Clone, Debug)]
pub struct MellinData {
    grid: LogRadialGrid,
    sphere: Option<Arc<SphericalQuadrature>>,
    radial: bool,
    frequencies: Vec<f64>,
    values: Vec<Complex64>,
}

impl MellinData {
    pub fn grid(&self) -> &LogRadialGrid {
        &self.grid
    }

    pub fn frequencies(&self) -> &[f64] {
        &self.frequencies
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    /// Number of sphere nodes (1 for profiles).
    pub fn slice_count(&self) -> usize {
        self.values.len() / self.grid.count()
    }

    pub fn slice(&self, j: usize) -> &[Complex64] {
        let n = self.grid.count();
        &self.values[j * n..(j + 1) * n]
    }

    pub fn spacing(&self) -> f64 {
        2.0 * PI / (self.grid.count() as f64 * self.grid.spacing())
    }

    pub fn nyquist(&self) -> f64 {
        PI / self.grid.spacing()
    }

    /// Σ_j w_j Σ_k |M|² Δτ (sphere weights are 1 for profiles).
    pub fn energy(&self) -> f64 {
        let dtau = self.spacing();
        let weights: Vec<f64> = match &self.sphere {
            Some(s) => s.weights().to_vec(),
            None => vec![1.0],
        };
        self.values
            .chunks(self.grid.count())
            .zip(weights)
            .map(|(c, w)| w * c.iter().map(|z| z.norm_sqr()).sum::<f64>())
            .sum::<f64>()
            * dtau
    }

    /// Pointwise multiplication by m(τ).
    pub fn apply_multiplier<F: Fn(f64) -> Complex64>(&self, m: F) -> Self {
        let factors: Vec<Complex64> = self.frequencies.iter().map(|&tau| m(tau)).collect();
        let n = self.grid.count();
        let values = self
            .values
            .iter()
            .enumerate()
            .map(|(k, z)| z * factors[k % n])
            .collect();
        Self {
            values,
            frequencies: self.frequencies.clone(),
            sphere: self.sphere.clone(),
            ..*self
        }
    }
}

fn frequencies(grid: &LogRadialGrid) -> Vec<f64> {
    let n = grid.count();
    let base = 2.0 * PI / (n as f64 * grid.spacing());
    (0..n).map(|k| base * (k as f64 - (n / 2) as f64)).collect()
}

fn transform(grid: &LogRadialGrid, values: &[Complex64], radial: bool) -> (Vec<f64>, Vec<Complex64>) {
    let n = grid.count();
    let h = grid.spacing();
    let taus = frequencies(grid);
    let fft = Fft::new(n);
    let phase: Vec<Complex64> = taus
        .iter()
        .map(|tau| Complex64::from_polar(h / (2.0 * PI).sqrt(), -tau * grid.s_min()))
        .collect();
    let half = n / 2;
    let one = |slice: &[Complex64], out: &mut [Complex64]| {
        let mut buf = slice.to_vec();
        fft.forward(&mut buf);
        for (k, o) in out.iter_mut().enumerate() {
            // bin of m = k − ⌊N/2⌋, taken mod N
            let bin = (k + n - half) % n;
            *o = buf[bin] * phase[k];
        }
    };
    let mut out = vec![Complex64::new(0.0, 0.0); values.len()];
    if radial {
        let (first, rest) = out.split_at_mut(n);
        one(&values[..n], first);
        for c in rest.chunks_mut(n) {
            c.copy_from_slice(first);
        }
    } else {
        for (src, dst) in values.chunks(n).zip(out.chunks_mut(n)) {
            one(src, dst);
        }
    }
    (taus, out)
}

fn untransform(d: &MellinData) -> Vec<Complex64> {
    let grid = d.grid;
    let n = grid.count();
    let h = grid.spacing();
    let fft = Fft::new(n);
    let scale = (2.0 * PI).sqrt() / (n as f64 * h);
    let phase: Vec<Complex64> = d
        .frequencies
        .iter()
        .map(|tau| Complex64::from_polar(scale, tau * grid.s_min()))
        .collect();
    let half = n / 2;
    let one = |slice: &[Complex64], out: &mut [Complex64]| {
        let mut buf = vec![Complex64::new(0.0, 0.0); n];
        for (k, z) in slice.iter().enumerate() {
            buf[(k + n - half) % n] = z * phase[k];
        }
        fft.inverse(&mut buf);
        out.copy_from_slice(&buf);
    };
    let mut out = vec![Complex64::new(0.0, 0.0); d.values.len()];
    if d.radial {
        let (first, rest) = out.split_at_mut(n);
        one(&d.values[..n], first);
        for c in rest.chunks_mut(n) {
            c.copy_from_slice(first);
        }
    } else {
        for (src, dst) in d.values.chunks(n).zip(out.chunks_mut(n)) {
            one(src, dst);
        }
    }
    out
}

/// M f = 𝓕(Φf), one transform per sphere node.
pub fn mellin_forward(f: &ScalarField) -> Result<MellinData> {
    Ok(forward_log(&phi_forward(f)?))
}

/// Fourier transform in s of a cylinder field.
pub fn forward_log(g: &LogField) -> MellinData {
    let (frequencies, values) = transform(g.grid(), g.values(), g.is_radial());
    MellinData {
        grid: *g.grid(),
        sphere: Some(g.sphere().clone()),
        radial: g.is_radial(),
        frequencies,
        values,
    }
}

/// Fourier transform of a one-variable profile.
pub fn forward_profile(p: &RadialProfile) -> MellinData {
    let (frequencies, values) = transform(p.grid(), p.values(), true);
    MellinData {
        grid: *p.grid(),
        sphere: None,
        radial: true,
        frequencies,
        values,
    }
}

/// Inverse of [`mellin_forward`].
pub fn mellin_inverse(d: &MellinData) -> Result<ScalarField> {
    phi_inverse(&inverse_log(d)?)
}

pub fn inverse_log(d: &MellinData) -> Result<LogField> {
    let sphere = d.sphere.clone().ok_or(Error::GridMismatch)?;
    LogField::from_values(d.grid, sphere, untransform(d), d.radial)
}

pub fn inverse_profile(d: &MellinData) -> Result<RadialProfile> {
    if d.sphere.is_some() {
        return Err(Error::GridMismatch);
    }
    RadialProfile::new(d.grid, untransform(d))
}

/// Largest deviation between two Mellin data sets over |τ| ≤ band.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SpectralDeviation {
    pub max_deviation: f64,
    /// Largest |Mf| on the band, for relative statements.
    pub scale: f64,
    pub band: f64,
}

impl SpectralDeviation {
    pub fn relative(&self) -> f64 {
        if self.scale == 0.0 {
            self.max_deviation
        } else {
            self.max_deviation / self.scale
        }
    }
}

fn compare_on_band<F>(lhs: &MellinData, rhs: &MellinData, multiplier: F) -> SpectralDeviation
where
    F: Fn(f64) -> Complex64,
{
    let band = RESOLVED_FRACTION * rhs.nyquist();
    let n = rhs.grid.count();
    let mut max_deviation: f64 = 0.0;
    let mut scale: f64 = 0.0;
    for (k, (a, b)) in lhs.values.iter().zip(&rhs.values).enumerate() {
        let tau = rhs.frequencies[k % n];
        if tau.abs() > band {
            continue;
        }
        scale = scale.max(b.norm());
        max_deviation = max_deviation.max((a - b * multiplier(tau)).norm());
    }
    SpectralDeviation {
        max_deviation,
        scale,
        band,
    }
}

/// ‖M(U(t)f) − e^{itτ} Mf‖_∞ on the resolved band.
pub fn check_dilation_shift(f: &ScalarField, t: f64) -> Result<SpectralDeviation> {
    let base = mellin_forward(f)?;
    let moved = mellin_forward(&dilate(f, t)?.field)?;
    Ok(compare_on_band(&moved, &base, |tau| Complex64::from_polar(1.0, t * tau)))
}

/// ‖M(Af) − τ Mf‖_∞ on the resolved band.
pub fn check_generator(f: &ScalarField, scheme: DerivativeScheme) -> Result<SpectralDeviation> {
    let g = phi_forward(f)?;
    let base = forward_log(&g);
    let ag = forward_log(&apply_a(&g, scheme)?);
    Ok(compare_on_band(&ag, &base, |tau| Complex64::new(tau, 0.0)))
}

/// ‖M(A(Af)) − τ² Mf‖_∞ on the resolved band.
pub fn check_generator_squared(f: &ScalarField, scheme: DerivativeScheme) -> Result<SpectralDeviation> {
    let g = phi_forward(f)?;
    let base = forward_log(&g);
    let aag = forward_log(&apply_a(&apply_a(&g, scheme)?, scheme)?);
    Ok(compare_on_band(&aag, &base, |tau| Complex64::new(tau * tau, 0.0)))
}

/// ‖M(P_t f) − e^{-tτ²} Mf‖_∞ on the resolved band, with P_t acting on Φf.
pub fn check_semigroup(f: &ScalarField, q: &SemigroupQuery) -> Result<SpectralDeviation> {
    let g = phi_forward(f)?;
    let base = forward_log(&g);
    let evolved = forward_log(&evolve(&g, q)?);
    let t = q.time;
    Ok(compare_on_band(&evolved, &base, |tau| Complex64::new((-t * tau * tau).exp(), 0.0)))
}
