//! Closed-form constants: sphere areas, half-integer gamma values and the
//! explicit inequality constants.

use core::f64::consts::PI;
#[allow(unused_imports)] // float methods are inherent once std is linked
use num_traits::Float;

/// Γ(m/2) for a positive integer `m`, by the exact half-integer recursion.
pub fn gamma_half(m: usize) -> f64 {
    assert!(m > 0, "gamma_half needs a positive argument");
    if m % 2 == 0 {
        // Γ(k) = (k-1)!
        (1..m / 2).fold(1.0, |acc, k| acc * k as f64)
    } else {
        // Γ(k + 1/2) = (k - 1/2)(k - 3/2)...(1/2) √π
        let k = m / 2;
        (0..k).fold(PI.sqrt(), |acc, j| acc * (j as f64 + 0.5))
    }
}

/// Surface measure of the unit sphere 𝕊^{n-1} ⊂ ℝⁿ, 2π^{n/2}/Γ(n/2).
pub fn sphere_area(n: usize) -> f64 {
    assert!(n > 0, "sphere_area needs n >= 1");
    2.0 * PI.powf(n as f64 / 2.0) / gamma_half(n)
}

/// Hölder conjugate p' = p/(p-1); infinite for p = 1.
pub fn conjugate(p: f64) -> f64 {
    if p == 1.0 {
        f64::INFINITY
    } else {
        p / (p - 1.0)
    }
}

/// Critical Sobolev exponent 2* = 2n/(n-2), defined for n ≥ 3.
pub fn critical_exponent(n: usize) -> Option<f64> {
    (n >= 3).then(|| 2.0 * n as f64 / (n as f64 - 2.0))
}

/// p* = np/(n-p) for 1 ≤ p < n.
pub fn sobolev_exponent(n: usize, p: f64) -> Option<f64> {
    let n = n as f64;
    (p >= 1.0 && p < n).then(|| n * p / (n - p))
}

/// Best constant {(n-p)/p}^p of the classical Hardy inequality.
pub fn hardy_constant(n: usize, p: f64) -> f64 {
    ((n as f64 - p) / p).powf(p)
}

/// (n/p)^p, the best constant for the dilation-generator Hardy inequality.
pub fn dilation_hardy_constant(n: usize, p: f64) -> f64 {
    (n as f64 / p).powf(p)
}

/// Optimal constant K(n) of the Sobolev inequality with Hardy remainder,
/// [πn(n-2)]^{-1} (Γ(n)/Γ(n/2))^{2/n} [(n-2)²/4]^{(n-1)/n}, for n ≥ 3.
pub fn stubbe_constant(n: usize) -> f64 {
    assert!(n >= 3, "K(n) needs n >= 3");
    let nf = n as f64;
    let ratio = gamma_half(2 * n) / gamma_half(n);
    let hardy = (nf - 2.0) * (nf - 2.0) / 4.0;
    ratio.powf(2.0 / nf) * hardy.powf((nf - 1.0) / nf) / (PI * nf * (nf - 2.0))
}

/// Constant (4π)^{-1/(2p)} (p')^{-1/(2p')} of the L^p → L^∞ heat smoothing
/// bound. For p = 1 the second factor tends to 1.
pub fn smoothing_linf_constant(p: f64) -> f64 {
    let first = (4.0 * PI).powf(-1.0 / (2.0 * p));
    if p == 1.0 {
        return first;
    }
    let pc = conjugate(p);
    first * pc.powf(-1.0 / (2.0 * pc))
}

pub fn erf(x: f64) -> f64 {
    libm::erf(x)
}

pub fn erfc(x: f64) -> f64 {
    libm::erfc(x)
}
