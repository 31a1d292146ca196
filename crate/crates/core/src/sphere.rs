//! Quadrature on the unit sphere 𝕊^{n-1}.
//!
//! n = 1 uses the two points ±1, n = 2 an equally spaced circle rule, n = 3 a
//! Gauss–Legendre rule in cos θ times a uniform azimuth rule. For n ≥ 4 only a
//! radial marker rule is available: one node carrying the whole area.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;
use num_complex::Complex64;
#[allow(unused_imports)] // float methods are inherent once std is linked
use num_traits::Float;

use crate::error::{Error, Result};
use crate::special::sphere_area;

#[derive(Clone, Debug, PartialEq)]
pub enum SphereLayout {
    /// 𝕊⁰ = {-1, +1}.
    Pair,
    /// Equally spaced angles θ_b = 2πb/count (count odd).
    Circle { count: usize },
    /// Polar Gauss nodes μ_a = cos θ_a times `azimuth` equally spaced angles;
    /// node index is a * azimuth + b.
    Product { polar: Vec<f64>, azimuth: usize },
    /// Valid for radial data only.
    RadialOnly,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SphericalQuadrature {
    dimension: usize,
    order: usize,
    nodes: Vec<f64>,
    weights: Vec<f64>,
    layout: SphereLayout,
    angular: Option<AngularOperator>,
}

/// Gauss–Legendre nodes and weights on [-1, 1], nodes ascending.
pub fn gauss_legendre(count: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; count];
    let mut weights = vec![0.0; count];
    let m = count.div_ceil(2);
    for i in 0..m {
        let mut x = (PI * (i as f64 + 0.75) / (count as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(count, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(count, x);
        dp = if d != 0.0 { d } else { dp };
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[count - 1 - i] = x;
        weights[i] = w;
        weights[count - 1 - i] = w;
    }
    (nodes, weights)
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

pub fn make_spherical_quadrature(dimension: usize, order: usize) -> Result<SphericalQuadrature> {
    if dimension == 0 {
        return Err(Error::InvalidQuadrature("dimension must be at least 1"));
    }
    if order == 0 {
        return Err(Error::InvalidQuadrature("order must be positive"));
    }
    let area = sphere_area(dimension);
    let (nodes, weights, layout) = match dimension {
        1 => (vec![-1.0, 1.0], vec![1.0, 1.0], SphereLayout::Pair),
        2 => {
            let count = 2 * order + 1;
            let mut nodes = Vec::with_capacity(2 * count);
            for b in 0..count {
                let theta = 2.0 * PI * b as f64 / count as f64;
                nodes.push(theta.cos());
                nodes.push(theta.sin());
            }
            (nodes, vec![area / count as f64; count], SphereLayout::Circle { count })
        }
        3 => {
            let polar_count = order / 2 + 1;
            let azimuth = 2 * order + 1;
            let (mu, mu_w) = gauss_legendre(polar_count);
            let mut nodes = Vec::with_capacity(3 * polar_count * azimuth);
            let mut weights = Vec::with_capacity(polar_count * azimuth);
            let dphi = 2.0 * PI / azimuth as f64;
            for (m, wm) in mu.iter().zip(&mu_w) {
                let sin_theta = (1.0 - m * m).max(0.0).sqrt();
                for b in 0..azimuth {
                    let phi = dphi * b as f64;
                    nodes.extend_from_slice(&[sin_theta * phi.cos(), sin_theta * phi.sin(), *m]);
                    weights.push(wm * dphi);
                }
            }
            (
                nodes,
                weights,
                SphereLayout::Product {
                    polar: mu,
                    azimuth,
                },
            )
        }
        _ => {
            let mut node = vec![0.0; dimension];
            node[0] = 1.0;
            (node, vec![area], SphereLayout::RadialOnly)
        }
    };
    let angular = AngularOperator::for_layout(&layout);
    Ok(SphericalQuadrature {
        dimension,
        order,
        nodes,
        weights,
        layout,
        angular,
    })
}

impl SphericalQuadrature {
    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn node(&self, j: usize) -> &[f64] {
        &self.nodes[j * self.dimension..(j + 1) * self.dimension]
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn layout(&self) -> &SphereLayout {
        &self.layout
    }

    pub fn is_radial_only(&self) -> bool {
        matches!(self.layout, SphereLayout::RadialOnly)
    }

    pub fn total_weight(&self) -> f64 {
        self.weights.iter().sum()
    }

    /// Σ_j w_j φ(ω_j).
    pub fn integrate<F: Fn(&[f64]) -> f64>(&self, f: F) -> f64 {
        (0..self.len()).map(|j| self.weights[j] * f(self.node(j))).sum()
    }

    /// |∇_ω φ|² at every node, for one sample per node. Zero for the pair and
    /// the radial marker rule.
    pub fn angular_gradient_sq(&self, values: &[Complex64], out: &mut [f64]) {
        assert_eq!(values.len(), self.len());
        assert_eq!(out.len(), self.len());
        match &self.angular {
            None => out.iter_mut().for_each(|o| *o = 0.0),
            Some(op) => op.gradient_sq(values, out),
        }
    }
}

/// Spectral angular differentiation for the circle and product rules.
#[derive(Clone, Debug, PartialEq)]
struct AngularOperator {
    /// Periodic differentiation matrix on the azimuth circle (row-major).
    azimuth: Vec<f64>,
    azimuth_count: usize,
    /// Lagrange differentiation matrix on the polar nodes (row-major), empty
    /// for the circle rule.
    polar: Vec<f64>,
    mu: Vec<f64>,
}

impl AngularOperator {
    fn for_layout(layout: &SphereLayout) -> Option<Self> {
        match layout {
            SphereLayout::Circle { count } => Some(Self {
                azimuth: periodic_diff_matrix(*count),
                azimuth_count: *count,
                polar: Vec::new(),
                mu: Vec::new(),
            }),
            SphereLayout::Product { polar, azimuth } => Some(Self {
                azimuth: periodic_diff_matrix(*azimuth),
                azimuth_count: *azimuth,
                polar: lagrange_diff_matrix(polar),
                mu: polar.clone(),
            }),
            _ => None,
        }
    }

    fn gradient_sq(&self, values: &[Complex64], out: &mut [f64]) {
        let m = self.azimuth_count;
        let rows = values.len() / m;
        let dmu = if self.mu.is_empty() {
            Vec::new()
        } else {
            self.polar_derivative(values, rows)
        };
        for a in 0..rows {
            let ring = &values[a * m..(a + 1) * m];
            let sin2 = if self.mu.is_empty() { 1.0 } else { 1.0 - self.mu[a] * self.mu[a] };
            for b in 0..m {
                let mut dphi = Complex64::new(0.0, 0.0);
                for (c, v) in ring.iter().enumerate() {
                    dphi += v * self.azimuth[b * m + c];
                }
                let mut total = dphi.norm_sqr() / sin2;
                if !dmu.is_empty() {
                    total += sin2 * dmu[a * m + b].norm_sqr();
                }
                out[a * m + b] = total;
            }
        }
    }

    /// ∂_μ at every node. Each azimuthal mode e^{ikφ} carries a factor
    /// sin^{|k|}θ, so odd modes are divided by sin θ before the polynomial
    /// differentiation in μ and the product rule is applied afterwards.
    fn polar_derivative(&self, values: &[Complex64], rows: usize) -> Vec<Complex64> {
        let m = self.azimuth_count;
        let half = (m / 2) as isize;
        let twiddle = |k: isize, b: usize| Complex64::from_polar(1.0, 2.0 * PI * (k * b as isize) as f64 / m as f64);
        let mut out = vec![Complex64::new(0.0, 0.0); values.len()];
        let mut column = vec![Complex64::new(0.0, 0.0); rows];
        for k in -half..=half {
            for (a, c) in column.iter_mut().enumerate() {
                let ring = &values[a * m..(a + 1) * m];
                let sum: Complex64 = ring.iter().enumerate().map(|(b, v)| v * twiddle(k, b).conj()).sum();
                *c = sum / m as f64;
            }
            let odd = k.rem_euclid(2) == 1;
            if odd {
                for (a, c) in column.iter_mut().enumerate() {
                    *c /= (1.0 - self.mu[a] * self.mu[a]).sqrt();
                }
            }
            for a in 0..rows {
                let mut d = Complex64::new(0.0, 0.0);
                for (c, v) in column.iter().enumerate() {
                    d += v * self.polar[a * rows + c];
                }
                if odd {
                    let mu = self.mu[a];
                    let sin = (1.0 - mu * mu).sqrt();
                    d = d * sin - column[a] * (mu / sin);
                }
                for b in 0..m {
                    out[a * m + b] += d * twiddle(k, b);
                }
            }
        }
        out
    }
}

/// Differentiation matrix for trigonometric interpolation on an odd number
/// of equally spaced points.
fn periodic_diff_matrix(count: usize) -> Vec<f64> {
    debug_assert!(count % 2 == 1);
    let h = 2.0 * PI / count as f64;
    let mut d = vec![0.0; count * count];
    for j in 0..count {
        for k in 0..count {
            if j != k {
                let diff = j as isize - k as isize;
                let sign = if diff.rem_euclid(2) == 0 { 1.0 } else { -1.0 };
                d[j * count + k] = 0.5 * sign / (diff as f64 * h / 2.0).sin();
            }
        }
    }
    d
}

fn lagrange_diff_matrix(nodes: &[f64]) -> Vec<f64> {
    let n = nodes.len();
    let bary: Vec<f64> = (0..n)
        .map(|a| {
            1.0 / (0..n)
                .filter(|&b| b != a)
                .map(|b| nodes[a] - nodes[b])
                .product::<f64>()
        })
        .collect();
    let mut d = vec![0.0; n * n];
    for a in 0..n {
        let mut diag = 0.0;
        for b in 0..n {
            if a != b {
                let v = bary[b] / bary[a] / (nodes[a] - nodes[b]);
                d[a * n + b] = v;
                diag -= v;
            }
        }
        d[a * n + a] = diag;
    }
    d
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pair_rule() {
        let q = make_spherical_quadrature(1, 7).unwrap();
        assert_eq!(q.len(), 2);
        assert_eq!(q.node(0), &[-1.0]);
        assert_eq!(q.node(1), &[1.0]);
        assert_eq!(q.total_weight(), 2.0);
    }

    #[test]
    fn sphere_total_and_odd_moment() {
        let q = make_spherical_quadrature(3, 20).unwrap();
        assert!((q.total_weight() - 4.0 * PI).abs() < 1e-12 * 4.0 * PI);
        assert!(q.integrate(|w| w[2]).abs() < 1e-12);
        for j in 0..q.len() {
            let norm: f64 = q.node(j).iter().map(|x| x * x).sum::<f64>().sqrt();
            assert!((norm - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn integrates_low_degree_harmonics() {
        // ∫ x² dω = 4π/3, ∫ x²y²z² dω = 4π/105, ∫ z⁴ dω = 4π/5
        let q = make_spherical_quadrature(3, 6).unwrap();
        let four_pi = 4.0 * PI;
        assert!((q.integrate(|w| w[0] * w[0]) - four_pi / 3.0).abs() < 1e-10);
        assert!((q.integrate(|w| (w[0] * w[1] * w[2]).powi(2)) - four_pi / 105.0).abs() < 1e-10);
        assert!((q.integrate(|w| w[2].powi(4)) - four_pi / 5.0).abs() < 1e-10);
        let c = make_spherical_quadrature(2, 4).unwrap();
        assert!((c.integrate(|w| w[0].powi(4)) - 0.75 * PI).abs() < 1e-10);
    }

    #[test]
    fn radial_marker_rule() {
        let q = make_spherical_quadrature(5, 3).unwrap();
        assert!(q.is_radial_only());
        assert_eq!(q.len(), 1);
        assert!((q.total_weight() - sphere_area(5)).abs() < 1e-12);
    }

    #[test]
    fn rejects_degenerate_requests() {
        assert!(make_spherical_quadrature(0, 3).is_err());
        assert!(make_spherical_quadrature(3, 0).is_err());
    }

    #[test]
    fn angular_gradient_of_cos_theta() {
        // |∇_ω cos θ|² = sin² θ
        let q = make_spherical_quadrature(3, 6).unwrap();
        let values: Vec<Complex64> = (0..q.len()).map(|j| Complex64::new(q.node(j)[2], 0.0)).collect();
        let mut out = vec![0.0; q.len()];
        q.angular_gradient_sq(&values, &mut out);
        for j in 0..q.len() {
            let z = q.node(j)[2];
            assert!((out[j] - (1.0 - z * z)).abs() < 1e-12);
        }
        // |∇_ω x|² = 1 - x² on the sphere
        let values: Vec<Complex64> = (0..q.len()).map(|j| Complex64::new(q.node(j)[0], 0.0)).collect();
        q.angular_gradient_sq(&values, &mut out);
        for j in 0..q.len() {
            let x = q.node(j)[0];
            assert!((out[j] - (1.0 - x * x)).abs() < 1e-12);
        }
    }

    #[test]
    fn angular_gradient_on_circle() {
        let q = make_spherical_quadrature(2, 5).unwrap();
        let values: Vec<Complex64> = (0..q.len()).map(|j| Complex64::new(q.node(j)[0], 0.0)).collect();
        let mut out = vec![0.0; q.len()];
        q.angular_gradient_sq(&values, &mut out);
        for j in 0..q.len() {
            let y = q.node(j)[1];
            assert!((out[j] - y * y).abs() < 1e-12);
        }
    }

    #[test]
    fn gauss_legendre_weights() {
        let (x, w) = gauss_legendre(7);
        assert!((w.iter().sum::<f64>() - 2.0).abs() < 1e-14);
        let m6: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(6)).sum();
        assert!((m6 - 2.0 / 7.0).abs() < 1e-14);
    }
}
