#![allow(dead_code)]

use std::sync::Arc;

use loglab_core::extremal::{FamilyKind, TrialFamily};
use loglab_core::field::{RadialProfile, ScalarField};
use loglab_core::grid::LogRadialGrid;
use loglab_core::inequalities::Params;
use loglab_core::sphere::{make_spherical_quadrature, SphericalQuadrature};
use loglab_core::Complex64;
use proptest::prelude::*;

pub fn with(pairs: &[(&str, f64)]) -> Params {
    pairs.iter().map(|(k, v)| (k.to_string(), *v)).collect()
}

pub fn sphere(n: usize, order: usize) -> Arc<SphericalQuadrature> {
    Arc::new(make_spherical_quadrature(n, order).unwrap())
}

/// Two-component mixture with r^{-power} prefactor; `unit` lives in [0,1]^8.
pub fn mixture(n: usize, power: f64, unit: &[f64]) -> ScalarField {
    let fam = TrialFamily::new(FamilyKind::Mixture { components: 2, power }, n).unwrap();
    fam.generate(&fam.from_unit(unit)).unwrap()
}

pub fn unit_point(len: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(0.0..1.0f64, len)
}

/// Smooth real profile: sum of Gaussians in s on the default grid.
pub fn gaussian_sum(unit: &[f64]) -> RadialProfile {
    gaussian_sum_on(LogRadialGrid::default(), unit)
}

pub fn gaussian_sum_on(grid: LogRadialGrid, unit: &[f64]) -> RadialProfile {
    RadialProfile::from_real_fn(grid, |s| {
        unit.chunks(3)
            .map(|c| {
                let amp = 0.2 + c[0];
                let mu = -3.0 + 6.0 * c[1];
                let sigma = 0.4 + 0.8 * c[2];
                amp * (-(s - mu).powi(2) / (2.0 * sigma * sigma)).exp()
            })
            .sum()
    })
    .unwrap()
}

pub fn gaussian3() -> ScalarField {
    ScalarField::from_radial_fn(LogRadialGrid::default(), sphere(3, 2), |r| {
        Complex64::new((-r * r / 2.0).exp(), 0.0)
    })
    .unwrap()
}

/// Relative gap |a - b| / max(|a|, |b|).
pub fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs())
}
