//! Lebesgue, weak-Lebesgue, B^α and weighted radial norms on sampled data.
//!
//! Integrals along s use the plain rectangle rule Σ·Δs. Integrands are
//! formed as exp(p·ln|v| + c·s) so that large radial weights and small
//! samples never overflow separately. Every norm of the zero input is 0.

use alloc::vec::Vec;
use num_complex::Complex64;
#[allow(unused_imports)] // float methods are inherent once std is linked
use num_traits::Float;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{weighted_power, LogField, RadialProfile, ScalarField};
use crate::grid::LogRadialGrid;
use crate::semigroup::{evolve, Method, SemigroupQuery, T_MIN};
use crate::special::critical_exponent;
use crate::sphere::SphericalQuadrature;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NormKind {
    LpRn,
    LpCylinder,
    LqLine,
    WeakLq,
    Besov,
    L2starRadial,
}

/// Radial weight in ∫|f|^p W dx.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RadialWeight {
    #[default]
    One,
    /// W = |x|^{-p}.
    InversePower,
}

/// Factor applied to F before the L^{2*}(ℝ⁺; r^{n-1}dr) norm.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Premultiplier {
    #[default]
    One,
    Radius,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct NormSpec {
    pub kind: NormKind,
    /// Lebesgue exponent, or α for the B^α norm.
    pub exponent: f64,
    #[serde(default)]
    pub weight: RadialWeight,
}

impl NormSpec {
    pub fn validate(&self) -> Result<()> {
        let e = self.exponent;
        match self.kind {
            NormKind::Besov => {
                if e.is_finite() && e < 0.0 {
                    Ok(())
                } else {
                    Err(Error::InvalidExponent(e))
                }
            }
            NormKind::WeakLq => check_weak(e),
            NormKind::L2starRadial => Ok(()),
            _ => check_exponent(e),
        }
    }
}

fn check_exponent(p: f64) -> Result<()> {
    if p.is_finite() && p >= 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidExponent(p))
    }
}

fn check_weak(q: f64) -> Result<()> {
    if q.is_finite() && q > 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidExponent(q))
    }
}

/// Σ_j w_j Σ_i |v_ij|^p e^{c s_i} Δs over node-major samples.
pub(crate) fn polar_sum(
    grid: &LogRadialGrid,
    weights: &[f64],
    values: &[Complex64],
    p: f64,
    growth: f64,
) -> f64 {
    let log_w: Vec<f64> = grid.points().map(|s| growth * s).collect();
    values
        .chunks(grid.count())
        .zip(weights)
        .map(|(slice, w)| {
            w * slice
                .iter()
                .zip(&log_w)
                .map(|(z, lw)| weighted_power(*z, p, *lw))
                .sum::<f64>()
        })
        .sum::<f64>()
        * grid.spacing()
}

/// ∫_{ℝⁿ} |f|^p W dx by polar quadrature (dx = r^n ds dω).
pub fn lp_integral_rn(f: &ScalarField, p: f64, weight: RadialWeight) -> Result<f64> {
    check_exponent(p)?;
    let n = f.dimension() as f64;
    let growth = match weight {
        RadialWeight::One => n,
        RadialWeight::InversePower => n - p,
    };
    Ok(polar_sum(f.grid(), f.sphere().weights(), f.values(), p, growth))
}

/// (∫_{ℝⁿ} |f|^p W dx)^{1/p}.
pub fn lp_norm_rn(f: &ScalarField, p: f64, weight: RadialWeight) -> Result<f64> {
    Ok(lp_integral_rn(f, p, weight)?.powf(1.0 / p))
}

/// ‖g‖_{L^p(ℝ × 𝕊^{n-1})}.
pub fn lp_norm_cylinder(g: &LogField, p: f64) -> Result<f64> {
    check_exponent(p)?;
    Ok(polar_sum(g.grid(), g.sphere().weights(), g.values(), p, 0.0).powf(1.0 / p))
}

/// ‖G‖_{L^q(ℝ)} = (Σ|G|^q Δs)^{1/q}.
pub fn lq_norm_line(profile: &RadialProfile, q: f64) -> Result<f64> {
    check_exponent(q)?;
    Ok(polar_sum(profile.grid(), &[1.0], profile.values(), q, 0.0).powf(1.0 / q))
}

/// sup_i |G(s_i)|.
pub fn sup_norm(profile: &RadialProfile) -> f64 {
    profile.max_abs()
}

/// ‖G‖_{q,∞} = sup_u (u^q λ{|G| ≥ u})^{1/q}, exact over the sample
/// distribution (λ counts samples times Δs).
pub fn weak_lq(profile: &RadialProfile, q: f64) -> Result<f64> {
    check_weak(q)?;
    let mut mags: Vec<f64> = profile.values().iter().map(|z| z.norm()).filter(|m| *m > 0.0).collect();
    mags.sort_by(|a, b| b.total_cmp(a));
    let h = profile.grid().spacing();
    let mut best = f64::NEG_INFINITY;
    let mut k = 0;
    while k < mags.len() {
        let u = mags[k];
        // ties all count towards λ{|G| ≥ u}
        let mut count = k + 1;
        while count < mags.len() && mags[count] == u {
            count += 1;
        }
        best = best.max(q * u.ln() + (count as f64 * h).ln());
        k = count;
    }
    Ok(if mags.is_empty() { 0.0 } else { (best / q).exp() })
}

/// Geometric time grid for the B^α supremum.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TimeGrid {
    pub t_min: f64,
    pub t_max: f64,
    pub count: usize,
}

impl Default for TimeGrid {
    /// 200 points on [1e-4, 1e4].
    fn default() -> Self {
        Self {
            t_min: 1e-4,
            t_max: 1e4,
            count: 200,
        }
    }
}

impl TimeGrid {
    pub fn validate(&self) -> Result<()> {
        if !(self.t_min >= T_MIN && self.t_max > self.t_min && self.t_max.is_finite() && self.count >= 2) {
            return Err(Error::TimeOutOfRange(self.t_min));
        }
        Ok(())
    }

    pub fn times(&self) -> impl Iterator<Item = f64> + '_ {
        let ratio = (self.t_max / self.t_min).ln() / (self.count - 1) as f64;
        (0..self.count).map(move |k| {
            if k + 1 == self.count {
                self.t_max
            } else {
                self.t_min * (ratio * k as f64).exp()
            }
        })
    }
}

/// Automatic widening of the time grid when the sup sits at an endpoint.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BesovOptions {
    pub times: TimeGrid,
    pub max_widenings: usize,
    pub widening_factor: f64,
}

impl Default for BesovOptions {
    fn default() -> Self {
        Self {
            times: TimeGrid::default(),
            max_widenings: 2,
            widening_factor: 10.0,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BesovValue {
    pub value: f64,
    /// Time at which the supremum was attained.
    pub t_star: f64,
    /// Time grid finally used.
    pub times: TimeGrid,
    pub widenings: usize,
}

/// ‖g‖_{B^α} = sup_t t^{-α/2} ‖P_t|G|‖_∞ with G the spherical mean of g.
pub fn besov_norm(g: &LogField, alpha: f64, options: &BesovOptions) -> Result<BesovValue> {
    besov_norm_profile(&g.spherical_mean()?, alpha, options)
}

/// B^α norm of a profile G given directly.
pub fn besov_norm_profile(profile: &RadialProfile, alpha: f64, options: &BesovOptions) -> Result<BesovValue> {
    if !(alpha.is_finite() && alpha < 0.0) {
        return Err(Error::InvalidExponent(alpha));
    }
    let modulus = profile.modulus();
    let mut times = options.times;
    let mut widenings = 0;
    loop {
        times.validate()?;
        if modulus.is_zero() {
            return Ok(BesovValue {
                value: 0.0,
                t_star: times.t_min,
                times,
                widenings,
            });
        }
        let mut best = (f64::NEG_INFINITY, 0usize, times.t_min);
        for (k, t) in times.times().enumerate() {
            let q = SemigroupQuery::new(t, Method::FastConvolution)?;
            let sup = evolve(&modulus, &q)?.max_abs();
            let v = -alpha / 2.0 * t.ln() + sup.ln();
            if v > best.0 {
                best = (v, k, t);
            }
        }
        let (log_value, k, t_star) = best;
        let at_low = k == 0;
        let at_high = k + 1 == times.count;
        if !(at_low || at_high) {
            return Ok(BesovValue {
                value: log_value.exp(),
                t_star,
                times,
                widenings,
            });
        }
        if widenings >= options.max_widenings {
            return Err(Error::BesovEndpoint { t: t_star });
        }
        widenings += 1;
        if at_low {
            times.t_min /= options.widening_factor;
        } else {
            times.t_max *= options.widening_factor;
        }
    }
}

/// (∫₀^∞ |pre·F(r)|^{2*} r^{n-1} dr)^{1/2*} with F sampled at r = e^{s_i}.
pub fn l2star_radial(profile: &RadialProfile, n: usize, pre: Premultiplier) -> Result<f64> {
    let q = critical_exponent(n).ok_or(Error::ParameterDomain {
        name: "n",
        value: n as f64,
        reason: "2* = 2n/(n-2) needs n >= 3",
    })?;
    let lift = match pre {
        Premultiplier::One => 0.0,
        Premultiplier::Radius => q,
    };
    Ok(polar_sum(profile.grid(), &[1.0], profile.values(), q, lift + n as f64).powf(1.0 / q))
}

/// Both sides of ‖𝓜(Φf)‖_{L^{2*}(ℝ)} = ‖rF‖_{L^{2*}(dμ)}, F = 𝓜(f),
/// dμ = r^{n-1}dr.
pub fn mean_norm_identity(f: &ScalarField) -> Result<(f64, f64)> {
    let n = f.dimension();
    let q = critical_exponent(n).ok_or(Error::ParameterDomain {
        name: "n",
        value: n as f64,
        reason: "2* = 2n/(n-2) needs n >= 3",
    })?;
    let lhs = lq_norm_line(&crate::field::phi_forward(f)?.spherical_mean()?, q)?;
    let rhs = l2star_radial(&f.spherical_mean()?, n, Premultiplier::Radius)?;
    Ok((lhs, rhs))
}

/// ∫ over the sphere of |φ|^p for one sample per node.
pub fn sphere_lp(sphere: &SphericalQuadrature, values: &[Complex64], p: f64) -> f64 {
    sphere
        .weights()
        .iter()
        .zip(values)
        .map(|(w, z)| w * z.norm().powf(p))
        .sum()
}
