//! Sampled functions on ℝⁿ in log-polar form, their images under the unitary
//! map Φ, and the operators L = x·∇, A and U(t) acting on them.
//!
//! Every field stores one slice of length `grid.count()` per sphere node
//! (node-major layout), so slice `j` holds the samples along the ray through
//! ω_j.

use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;
use num_complex::Complex64;
#[allow(unused_imports)] // float methods are inherent once std is linked
use num_traits::Float;

use crate::deriv::{DerivativeScheme, Differentiator};
use crate::error::{Error, Result};
use crate::grid::LogRadialGrid;
use crate::special::sphere_area;
use crate::sphere::SphericalQuadrature;

/// Samples f(e^{s_i} ω_j) of a function on ℝⁿ.
#[derive(Clone, Debug)]
pub struct ScalarField {
    grid: LogRadialGrid,
    sphere: Arc<SphericalQuadrature>,
    values: Vec<Complex64>,
    radial: bool,
}

/// Samples g(s_i, ω_j) of a function on the cylinder ℝ × 𝕊^{n-1}.
#[derive(Clone, Debug)]
pub struct LogField {
    grid: LogRadialGrid,
    sphere: Arc<SphericalQuadrature>,
    values: Vec<Complex64>,
    radial: bool,
}

/// Samples G(s_i) of a function of one variable.
#[derive(Clone, Debug, PartialEq)]
pub struct RadialProfile {
    grid: LogRadialGrid,
    values: Vec<Complex64>,
}

fn check_finite(values: &[Complex64]) -> Result<()> {
    match values.iter().position(|z| !(z.re.is_finite() && z.im.is_finite())) {
        Some(index) => Err(Error::NonFinite { index }),
        None => Ok(()),
    }
}

fn sample_nodes<F>(grid: &LogRadialGrid, sphere: &SphericalQuadrature, f: F) -> Vec<Complex64>
where
    F: Fn(f64, &[f64]) -> Complex64,
{
    let mut values = Vec::with_capacity(grid.count() * sphere.len());
    for j in 0..sphere.len() {
        let omega = sphere.node(j);
        values.extend(grid.points().map(|s| f(s, omega)));
    }
    values
}

fn sample_radial<F>(grid: &LogRadialGrid, sphere: &SphericalQuadrature, f: F) -> Vec<Complex64>
where
    F: Fn(f64) -> Complex64,
{
    let ray: Vec<Complex64> = grid.points().map(f).collect();
    let mut values = Vec::with_capacity(ray.len() * sphere.len());
    for _ in 0..sphere.len() {
        values.extend_from_slice(&ray);
    }
    values
}

macro_rules! sampled_field_common {
    ($ty:ident) => {
        impl $ty {
            pub fn from_values(
                grid: LogRadialGrid,
                sphere: Arc<SphericalQuadrature>,
                values: Vec<Complex64>,
                radial: bool,
            ) -> Result<Self> {
                if values.len() != grid.count() * sphere.len() {
                    return Err(Error::GridMismatch);
                }
                if sphere.is_radial_only() && !radial {
                    return Err(Error::NonRadialData);
                }
                check_finite(&values)?;
                Ok(Self {
                    grid,
                    sphere,
                    values,
                    radial,
                })
            }

            pub fn grid(&self) -> &LogRadialGrid {
                &self.grid
            }

            pub fn sphere(&self) -> &Arc<SphericalQuadrature> {
                &self.sphere
            }

            pub fn dimension(&self) -> usize {
                self.sphere.dimension()
            }

            pub fn values(&self) -> &[Complex64] {
                &self.values
            }

            /// True when the field was declared independent of ω.
            pub fn is_radial(&self) -> bool {
                self.radial
            }

            /// Samples along the ray through sphere node `j`.
            pub fn slice(&self, j: usize) -> &[Complex64] {
                let n = self.grid.count();
                &self.values[j * n..(j + 1) * n]
            }

            pub fn slices(&self) -> impl Iterator<Item = &[Complex64]> {
                self.values.chunks(self.grid.count())
            }

            #[inline]
            pub fn value(&self, i: usize, j: usize) -> Complex64 {
                self.values[j * self.grid.count() + i]
            }

            pub fn is_zero(&self) -> bool {
                self.values.iter().all(|z| z.re == 0.0 && z.im == 0.0)
            }

            pub fn max_abs(&self) -> f64 {
                self.values.iter().fold(0.0, |m, z| m.max(z.norm()))
            }

            pub fn scaled(&self, c: Complex64) -> Self {
                self.with_values(self.values.iter().map(|z| z * c).collect())
            }

            pub(crate) fn with_values(&self, values: Vec<Complex64>) -> Self {
                debug_assert_eq!(values.len(), self.values.len());
                Self {
                    grid: self.grid,
                    sphere: self.sphere.clone(),
                    values,
                    radial: self.radial,
                }
            }

            /// True when both fields share grid and sphere.
            pub fn same_layout<T: SampledField>(&self, other: &T) -> bool {
                self.grid.matches(other.grid()) && *self.sphere == **other.sphere()
            }
        }

        impl SampledField for $ty {
            fn grid(&self) -> &LogRadialGrid {
                &self.grid
            }
            fn sphere(&self) -> &Arc<SphericalQuadrature> {
                &self.sphere
            }
            fn values(&self) -> &[Complex64] {
                &self.values
            }
        }
    };
}

/// Shared read access to node-major sampled fields.
pub trait SampledField {
    fn grid(&self) -> &LogRadialGrid;
    fn sphere(&self) -> &Arc<SphericalQuadrature>;
    fn values(&self) -> &[Complex64];
}

sampled_field_common!(ScalarField);
sampled_field_common!(LogField);

impl ScalarField {
    /// Samples f(r ω) for a general (angle-dependent) function.
    pub fn from_fn<F>(grid: LogRadialGrid, sphere: Arc<SphericalQuadrature>, f: F) -> Result<Self>
    where
        F: Fn(f64, &[f64]) -> Complex64,
    {
        if sphere.is_radial_only() {
            return Err(Error::NonRadialData);
        }
        let values = sample_nodes(&grid, &sphere, |s, w| f(s.exp(), w));
        Self::from_values(grid, sphere, values, false)
    }

    /// Samples a radial function f(|x|).
    pub fn from_radial_fn<F>(grid: LogRadialGrid, sphere: Arc<SphericalQuadrature>, f: F) -> Result<Self>
    where
        F: Fn(f64) -> Complex64,
    {
        let values = sample_radial(&grid, &sphere, |s| f(s.exp()));
        Self::from_values(grid, sphere, values, true)
    }

    /// Samples a radial function given in the log variable, f(e^s) = h(s).
    /// Useful when r^{-a} factors would overflow if formed separately.
    pub fn from_log_radial_fn<F>(grid: LogRadialGrid, sphere: Arc<SphericalQuadrature>, h: F) -> Result<Self>
    where
        F: Fn(f64) -> Complex64,
    {
        let values = sample_radial(&grid, &sphere, h);
        Self::from_values(grid, sphere, values, true)
    }

    /// Samples f(e^s ω) = h(s, ω).
    pub fn from_log_fn<F>(grid: LogRadialGrid, sphere: Arc<SphericalQuadrature>, h: F) -> Result<Self>
    where
        F: Fn(f64, &[f64]) -> Complex64,
    {
        if sphere.is_radial_only() {
            return Err(Error::NonRadialData);
        }
        let values = sample_nodes(&grid, &sphere, h);
        Self::from_values(grid, sphere, values, false)
    }

    /// Pointwise product with a radial factor ρ(s).
    pub fn times_radial<F: Fn(f64) -> f64>(&self, rho: F) -> Self {
        let factors: Vec<f64> = self.grid.points().map(rho).collect();
        let n = self.grid.count();
        let values = self
            .values
            .iter()
            .enumerate()
            .map(|(k, z)| z * factors[k % n])
            .collect();
        self.with_values(values)
    }

    /// Spherical mean F(r_i) = |𝕊^{n-1}|^{-1} Σ_j w_j f(r_i ω_j).
    pub fn spherical_mean(&self) -> Result<RadialProfile> {
        mean_over_sphere(&self.grid, &self.sphere, &self.values, self.radial)
    }

    /// Mass of |f|^p |x|^n·(dx/|x|^n) outside the inner `fraction` of the
    /// grid, relative to the total.
    pub fn tail_report(&self, p: f64, fraction: f64) -> TailReport {
        let n = self.dimension() as f64;
        tail_report(&self.grid, &self.sphere, &self.values, p, n, fraction)
    }
}

impl LogField {
    pub fn from_fn<F>(grid: LogRadialGrid, sphere: Arc<SphericalQuadrature>, g: F) -> Result<Self>
    where
        F: Fn(f64, &[f64]) -> Complex64,
    {
        if sphere.is_radial_only() {
            return Err(Error::NonRadialData);
        }
        let values = sample_nodes(&grid, &sphere, g);
        Self::from_values(grid, sphere, values, false)
    }

    pub fn from_radial_fn<F>(grid: LogRadialGrid, sphere: Arc<SphericalQuadrature>, g: F) -> Result<Self>
    where
        F: Fn(f64) -> Complex64,
    {
        let values = sample_radial(&grid, &sphere, g);
        Self::from_values(grid, sphere, values, true)
    }

    pub fn spherical_mean(&self) -> Result<RadialProfile> {
        mean_over_sphere(&self.grid, &self.sphere, &self.values, self.radial)
    }

    pub fn tail_report(&self, p: f64, fraction: f64) -> TailReport {
        tail_report(&self.grid, &self.sphere, &self.values, p, 0.0, fraction)
    }

    /// L²(ℝ × 𝕊^{n-1}) norm.
    pub fn l2_norm(&self) -> f64 {
        let h = self.grid.spacing();
        self.slices()
            .zip(self.sphere.weights())
            .map(|(slice, w)| w * slice.iter().map(|z| z.norm_sqr()).sum::<f64>())
            .sum::<f64>()
            .mul_add(h, 0.0)
            .sqrt()
    }
}

impl RadialProfile {
    pub fn new(grid: LogRadialGrid, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != grid.count() {
            return Err(Error::GridMismatch);
        }
        check_finite(&values)?;
        Ok(Self { grid, values })
    }

    pub fn from_fn<F: Fn(f64) -> Complex64>(grid: LogRadialGrid, f: F) -> Result<Self> {
        let values = grid.points().map(f).collect();
        Self::new(grid, values)
    }

    pub fn from_real_fn<F: Fn(f64) -> f64>(grid: LogRadialGrid, f: F) -> Result<Self> {
        Self::from_fn(grid, |s| Complex64::new(f(s), 0.0))
    }

    pub fn grid(&self) -> &LogRadialGrid {
        &self.grid
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<Complex64> {
        self.values
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, z| m.max(z.norm()))
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|z| z.re == 0.0 && z.im == 0.0)
    }

    /// Pointwise modulus as a real profile.
    pub fn modulus(&self) -> Self {
        Self {
            grid: self.grid,
            values: self.values.iter().map(|z| Complex64::new(z.norm(), 0.0)).collect(),
        }
    }

    pub fn scaled(&self, c: Complex64) -> Self {
        Self {
            grid: self.grid,
            values: self.values.iter().map(|z| z * c).collect(),
        }
    }

    /// Largest |G(s_i)| over nodes with |s_i| > limit.
    pub fn max_outside(&self, limit: f64) -> Option<(f64, f64)> {
        outside_max(&self.grid, core::iter::once(self.values.as_slice()), limit)
    }

    /// Sup-norm distance to another profile on the same grid.
    pub fn max_distance(&self, other: &Self) -> f64 {
        self.values
            .iter()
            .zip(&other.values)
            .fold(0.0, |m, (a, b)| m.max((a - b).norm()))
    }
}

pub(crate) fn outside_max<'a, I>(grid: &LogRadialGrid, slices: I, limit: f64) -> Option<(f64, f64)>
where
    I: Iterator<Item = &'a [Complex64]>,
{
    let mut worst: Option<(f64, f64)> = None;
    for slice in slices {
        for (i, z) in slice.iter().enumerate() {
            let s = grid.point(i);
            if s.abs() > limit {
                let m = z.norm();
                if m > 0.0 && worst.map_or(true, |(w, _)| m > w) {
                    worst = Some((m, s));
                }
            }
        }
    }
    worst
}

fn mean_over_sphere(
    grid: &LogRadialGrid,
    sphere: &SphericalQuadrature,
    values: &[Complex64],
    radial: bool,
) -> Result<RadialProfile> {
    if sphere.is_radial_only() && !radial {
        return Err(Error::NonRadialData);
    }
    let n = grid.count();
    let area = sphere_area(sphere.dimension());
    let mut mean = vec![Complex64::new(0.0, 0.0); n];
    for (slice, w) in values.chunks(n).zip(sphere.weights()) {
        for (m, z) in mean.iter_mut().zip(slice) {
            *m += z * *w;
        }
    }
    for m in mean.iter_mut() {
        *m /= area;
    }
    RadialProfile::new(*grid, mean)
}

/// Relative tail mass of a density |v|^p e^{c s} outside the inner part of
/// the grid.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TailReport {
    pub exponent: f64,
    pub inner_fraction: f64,
    pub total: f64,
    pub outer: f64,
}

impl TailReport {
    pub fn relative(&self) -> f64 {
        if self.total == 0.0 {
            0.0
        } else {
            self.outer / self.total
        }
    }

    pub fn within(&self, tolerance: f64) -> bool {
        self.relative() <= tolerance
    }
}

/// |v|^p e^{c s}, evaluated in log form so that large and small factors do
/// not overflow separately.
#[inline]
pub(crate) fn weighted_power(v: Complex64, p: f64, log_weight: f64) -> f64 {
    let m = v.norm();
    if m == 0.0 {
        0.0
    } else {
        (p * m.ln() + log_weight).exp()
    }
}

fn tail_report(
    grid: &LogRadialGrid,
    sphere: &SphericalQuadrature,
    values: &[Complex64],
    p: f64,
    growth: f64,
    fraction: f64,
) -> TailReport {
    let inner = grid.inner_range(fraction);
    let mut total = 0.0;
    let mut outer = 0.0;
    for (slice, w) in values.chunks(grid.count()).zip(sphere.weights()) {
        for (i, z) in slice.iter().enumerate() {
            let d = w * weighted_power(*z, p, growth * grid.point(i));
            total += d;
            if !inner.contains(&i) {
                outer += d;
            }
        }
    }
    TailReport {
        exponent: p,
        inner_fraction: fraction,
        total,
        outer,
    }
}

/// (Φf)(s, ω) = e^{sn/2} f(e^s ω).
pub fn phi_forward(f: &ScalarField) -> Result<LogField> {
    let half_n = f.dimension() as f64 / 2.0;
    let values = rescale(f.grid(), f.values(), half_n);
    LogField::from_values(f.grid, f.sphere.clone(), values, f.radial)
}

/// (Φ⁻¹g)(r ω) = r^{-n/2} g(ln r, ω).
pub fn phi_inverse(g: &LogField) -> Result<ScalarField> {
    let half_n = g.dimension() as f64 / 2.0;
    // divide by the forward factors so the roundtrip is exact up to rounding
    let factors: Vec<f64> = g.grid().points().map(|s| (half_n * s).exp()).collect();
    let n = g.grid().count();
    let values = g.values().iter().enumerate().map(|(k, z)| *z / factors[k % n]).collect();
    ScalarField::from_values(g.grid, g.sphere.clone(), values, g.radial)
}

fn rescale(grid: &LogRadialGrid, values: &[Complex64], rate: f64) -> Vec<Complex64> {
    let factors: Vec<f64> = grid.points().map(|s| (rate * s).exp()).collect();
    let n = grid.count();
    values
        .iter()
        .enumerate()
        .map(|(k, z)| *z * factors[k % n])
        .collect()
}

/// G = 𝓜(g), the average over the sphere at each s.
pub fn spherical_mean(g: &LogField) -> Result<RadialProfile> {
    g.spherical_mean()
}

fn differentiate_slices(
    grid: &LogRadialGrid,
    values: &[Complex64],
    radial: bool,
    scheme: DerivativeScheme,
) -> Result<Vec<Complex64>> {
    let n = grid.count();
    let d = Differentiator::new(scheme, n, grid.spacing())?;
    let mut out = vec![Complex64::new(0.0, 0.0); values.len()];
    if radial {
        let (first, rest) = out.split_at_mut(n);
        d.apply_into(&values[..n], first);
        for chunk in rest.chunks_mut(n) {
            chunk.copy_from_slice(first);
        }
    } else {
        for (src, dst) in values.chunks(n).zip(out.chunks_mut(n)) {
            d.apply_into(src, dst);
        }
    }
    Ok(out)
}

/// ∂g/∂s slice by slice.
pub fn derivative_s(g: &LogField, scheme: DerivativeScheme) -> Result<LogField> {
    let values = differentiate_slices(g.grid(), g.values(), g.radial, scheme)?;
    LogField::from_values(g.grid, g.sphere.clone(), values, g.radial)
}

/// Φ A Φ⁻¹ = -i ∂_s acting on a cylinder field.
pub fn apply_a(g: &LogField, scheme: DerivativeScheme) -> Result<LogField> {
    let mut values = differentiate_slices(g.grid(), g.values(), g.radial, scheme)?;
    let minus_i = Complex64::new(0.0, -1.0);
    values.iter_mut().for_each(|z| *z *= minus_i);
    LogField::from_values(g.grid, g.sphere.clone(), values, g.radial)
}

/// L f = (x·∇) f, computed as Φ⁻¹ (∂_s − n/2) Φ f.
pub fn apply_l(f: &ScalarField, scheme: DerivativeScheme) -> Result<ScalarField> {
    let g = phi_forward(f)?;
    let half_n = f.dimension() as f64 / 2.0;
    let mut values = differentiate_slices(g.grid(), g.values(), g.radial, scheme)?;
    for (d, z) in values.iter_mut().zip(g.values()) {
        *d -= z * half_n;
    }
    let lg = LogField::from_values(g.grid, g.sphere.clone(), values, g.radial)?;
    phi_inverse(&lg)
}

/// Result of a dilation: the field, an estimate of the interpolation error
/// (sup of the cubic−quintic difference in the Φ picture) and the relative
/// L² mass shifted off the grid.
#[derive(Clone, Debug)]
pub struct Dilation {
    pub field: ScalarField,
    pub interpolation_error: f64,
    pub tail_loss: f64,
}

/// (U(t)f)(x) = e^{tn/2} f(e^t x), i.e. a shift by t of Φf.
pub fn dilate(f: &ScalarField, t: f64) -> Result<Dilation> {
    let grid = *f.grid();
    if !t.is_finite() || t.abs() >= grid.span() {
        return Err(Error::ShiftTooLarge {
            shift: t,
            span: grid.span(),
        });
    }
    if t == 0.0 {
        return Ok(Dilation {
            field: f.clone(),
            interpolation_error: 0.0,
            tail_loss: 0.0,
        });
    }
    let g = phi_forward(f)?;
    let n = grid.count();
    let h = grid.spacing();
    let mut shifted = Vec::with_capacity(g.values().len());
    let mut err: f64 = 0.0;
    let mut lost = 0.0;
    let mut total = 0.0;
    for (slice, w) in g.slices().zip(g.sphere().weights()) {
        for i in 0..n {
            let x = i as f64 + t / h;
            let cubic = lagrange_interp(slice, x, 2);
            let quintic = lagrange_interp(slice, x, 3);
            err = err.max((cubic - quintic).norm());
            shifted.push(cubic);
            let back = grid.point(i) - t;
            let m = w * slice[i].norm_sqr();
            total += m;
            if back < grid.s_min() || back > grid.s_max() {
                lost += m;
            }
        }
    }
    let moved = LogField::from_values(grid, g.sphere.clone(), shifted, g.radial)?;
    Ok(Dilation {
        field: phi_inverse(&moved)?,
        interpolation_error: err,
        tail_loss: if total > 0.0 { lost / total } else { 0.0 },
    })
}

/// Local Lagrange interpolation with `half` nodes on each side of x
/// (half = 2: cubic, half = 3: quintic). Samples beyond the grid are zero.
pub(crate) fn lagrange_interp(values: &[Complex64], x: f64, half: usize) -> Complex64 {
    let n = values.len() as isize;
    let base = x.floor();
    let u = x - base;
    let k0 = base as isize;
    if u == 0.0 {
        return if (0..n).contains(&k0) {
            values[k0 as usize]
        } else {
            Complex64::new(0.0, 0.0)
        };
    }
    let lo = 1 - half as isize;
    let hi = half as isize;
    let mut acc = Complex64::new(0.0, 0.0);
    for k in lo..=hi {
        let idx = k0 + k;
        if !(0..n).contains(&idx) {
            continue;
        }
        let mut w = 1.0;
        for m in lo..=hi {
            if m != k {
                w *= (u - m as f64) / (k - m) as f64;
            }
        }
        acc += values[idx as usize] * w;
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sphere::make_spherical_quadrature;
    use core::f64::consts::PI;

    fn sphere(n: usize, order: usize) -> Arc<SphericalQuadrature> {
        Arc::new(make_spherical_quadrature(n, order).unwrap())
    }

    fn c(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    #[test]
    fn phi_of_critical_power_is_one() {
        for n in 1..=5 {
            let f = ScalarField::from_radial_fn(LogRadialGrid::default(), sphere(n, 2), |r| {
                c(r.powf(-(n as f64) / 2.0))
            })
            .unwrap();
            let g = phi_forward(&f).unwrap();
            assert!(g.values().iter().all(|z| (z - c(1.0)).norm() < 1e-12));
            let back = phi_inverse(&LogField::from_radial_fn(*f.grid(), f.sphere().clone(), |_| c(1.0)).unwrap())
                .unwrap();
            for (a, b) in back.values().iter().zip(f.values()) {
                assert!((a - b).norm() <= 1e-12 * b.norm());
            }
        }
    }

    #[test]
    fn gaussian_cylinder_norm() {
        let f = ScalarField::from_radial_fn(LogRadialGrid::default(), sphere(3, 2), |r| c((-r * r / 2.0).exp()))
            .unwrap();
        let g = phi_forward(&f).unwrap();
        let norm_sq = g.l2_norm().powi(2);
        assert!((norm_sq - PI.powf(1.5)).abs() < 1e-9 * PI.powf(1.5));
    }

    #[test]
    fn spherical_mean_removes_first_harmonic() {
        let grid = LogRadialGrid::new(-4.0, 4.0, 64).unwrap();
        let g = LogField::from_fn(grid, sphere(3, 8), |s, w| c((-s * s).exp() * (1.0 + w[2]))).unwrap();
        let mean = g.spherical_mean().unwrap();
        for (i, z) in mean.values().iter().enumerate() {
            let s = grid.point(i);
            assert!((z - c((-s * s).exp())).norm() < 1e-14);
        }
    }

    #[test]
    fn radial_only_rule_rejects_angular_data() {
        let q = sphere(4, 2);
        let grid = LogRadialGrid::new(-4.0, 4.0, 64).unwrap();
        assert_eq!(
            LogField::from_fn(grid, q.clone(), |_, _| c(1.0)).unwrap_err(),
            Error::NonRadialData
        );
        let values = vec![c(1.0); 64];
        assert_eq!(
            LogField::from_values(grid, q, values, false).unwrap_err(),
            Error::NonRadialData
        );
    }

    #[test]
    fn l_of_homogeneous_function() {
        let grid = LogRadialGrid::new(-3.0, 3.0, 256).unwrap();
        let f = ScalarField::from_radial_fn(grid, sphere(3, 2), |r| c(r * r)).unwrap();
        let lf = apply_l(&f, DerivativeScheme::Central8).unwrap();
        for (a, b) in lf.values().iter().zip(f.values()) {
            assert!((a - b * 2.0).norm() <= 1e-8 * b.norm());
        }
    }

    #[test]
    fn a_on_plane_wave_and_constant() {
        let grid = LogRadialGrid::new(0.0, 2.0 * PI, 257).unwrap();
        let q = sphere(1, 1);
        let k = 3.0;
        let g = LogField::from_radial_fn(grid, q.clone(), |s| Complex64::from_polar(1.0, k * s)).unwrap();
        let ag = apply_a(&g, DerivativeScheme::Central8).unwrap();
        for (a, b) in ag.values().iter().zip(g.values()) {
            assert!((a - b * k).norm() < 1e-7);
        }
        let one = LogField::from_radial_fn(grid, q, |_| c(1.0)).unwrap();
        assert!(apply_a(&one, DerivativeScheme::Central8)
            .unwrap()
            .values()
            .iter()
            .all(|z| z.norm() < 1e-10));
    }

    #[test]
    fn dilation_zero_is_identity() {
        let f = ScalarField::from_radial_fn(LogRadialGrid::default(), sphere(2, 2), |r| c((-r).exp())).unwrap();
        let d = dilate(&f, 0.0).unwrap();
        for (a, b) in d.field.values().iter().zip(f.values()) {
            assert!((a - b).norm() <= 1e-12 * b.norm());
        }
        assert!(dilate(&f, 30.0).is_err());
    }

    #[test]
    fn interpolation_is_exact_on_cubics() {
        let values: Vec<Complex64> = (0..20).map(|k| c((k as f64).powi(3) - 2.0 * k as f64)).collect();
        let x = 7.3;
        let z = lagrange_interp(&values, x, 2);
        assert!((z.re - (x * x * x - 2.0 * x)).abs() < 1e-10);
    }
}
