//! P_t = e^{-tA²} as a Gaussian convolution in s, and e^{-tL*L} = e^{-tn²/4} P_t.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;
use num_complex::Complex64;
#[allow(unused_imports)] // float methods are inherent once std is linked
use num_traits::Float;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fft::Fft;
use crate::field::{phi_forward, phi_inverse, LogField, RadialProfile, ScalarField};
use crate::grid::LogRadialGrid;
use crate::mellin;
use crate::special::erfc;

/// Smallest supported time; below it the kernel is not resolved by the
/// default spacing.
pub const T_MIN: f64 = 1e-4;
/// Largest supported time.
pub const T_MAX: f64 = 1e8;
/// Largest admissible wrap-around mass for the periodic paths.
pub const LEAKAGE_TOLERANCE: f64 = 1e-12;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    Direct,
    #[default]
    FastConvolution,
    MellinMultiplier,
}

impl Method {
    pub const ALL: [Method; 3] = [Method::Direct, Method::FastConvolution, Method::MellinMultiplier];

    pub fn name(self) -> &'static str {
        match self {
            Method::Direct => "direct",
            Method::FastConvolution => "fast-convolution",
            Method::MellinMultiplier => "mellin-multiplier",
        }
    }
}

impl core::str::FromStr for Method {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Method::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or(Error::ParameterDomain {
                name: "method",
                value: f64::NAN,
                reason: "expected direct, fast-convolution or mellin-multiplier",
            })
    }
}

/// How samples beyond the grid are modeled.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Extension {
    /// Zero outside the grid.
    #[default]
    Zero,
    /// Constant continuation of the two end values.
    Edge,
}

/// Edge extension is done by materializing samples up to this many kernel
/// widths out, where the Gaussian tail is below 1e-16.
const EDGE_WIDTHS: f64 = 12.0;
const EDGE_MAX_SAMPLES: usize = 1 << 20;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SemigroupQuery {
    pub time: f64,
    pub method: Method,
    pub pad_width: f64,
    #[serde(default)]
    pub extension: Extension,
}

fn check_time(t: f64) -> Result<()> {
    if t.is_finite() && (T_MIN..=T_MAX).contains(&t) {
        Ok(())
    } else {
        Err(Error::TimeOutOfRange(t))
    }
}

impl SemigroupQuery {
    /// Query with the minimal padding 8√t.
    pub fn new(time: f64, method: Method) -> Result<Self> {
        check_time(time)?;
        Ok(Self {
            time,
            method,
            pad_width: 8.0 * time.sqrt(),
            extension: Extension::Zero,
        })
    }

    pub fn with_extension(mut self, extension: Extension) -> Self {
        self.extension = extension;
        self
    }

    pub fn with_pad(time: f64, method: Method, pad_width: f64) -> Result<Self> {
        check_time(time)?;
        let required = 8.0 * time.sqrt();
        if !(pad_width >= required) {
            return Err(Error::PaddingTooSmall {
                pad: pad_width,
                required,
            });
        }
        Ok(Self {
            time,
            method,
            pad_width,
            extension: Extension::Zero,
        })
    }

    pub fn validate(&self) -> Result<()> {
        Self::with_pad(self.time, self.method, self.pad_width).map(|_| ())
    }
}

/// (4πt)^{-1/2} exp(-(r-s)²/4t).
pub fn heat_kernel(r: f64, s: f64, t: f64) -> Result<f64> {
    if !(t > 0.0) || !t.is_finite() {
        return Err(Error::TimeOutOfRange(t));
    }
    Ok(kernel(r - s, t))
}

#[inline]
fn kernel(d: f64, t: f64) -> f64 {
    (-d * d / (4.0 * t)).exp() / (4.0 * PI * t).sqrt()
}

/// h Σ_{j∈ℤ} K(jh) by Poisson summation: 1 + 2 Σ_m exp(-4π²m²t/h²).
fn lattice_mass(h: f64, t: f64) -> f64 {
    let mut mass = 1.0;
    for m in 1..64 {
        let term = 2.0 * (-4.0 * PI * PI * (m * m) as f64 * t / (h * h)).exp();
        mass += term;
        if term < 1e-18 {
            break;
        }
    }
    mass
}

#[derive(Clone, Copy, Debug, PartialEq)]
enum Kernel {
    Value,
    /// d/ds of the evolved data.
    Derivative,
}

struct Plan {
    count: usize,
    spacing: f64,
    t: f64,
    method: Method,
    kind: Kernel,
    pad_left: usize,
    len: usize,
    /// Direct: signed-offset weights for d = 0..count.
    weights: Vec<f64>,
    fft: Option<Fft>,
    kernel_hat: Vec<Complex64>,
}

impl Plan {
    fn new(grid: &LogRadialGrid, q: &SemigroupQuery, kind: Kernel) -> Result<Self> {
        q.validate()?;
        let n = grid.count();
        let h = grid.spacing();
        let t = q.time;
        let pad = q.pad_width.max(10.0 * h);
        let pad_samples = ((pad / h).ceil() as usize).min(n);
        let len = (n + 2 * pad_samples).next_power_of_two();
        let pad_left = (len - n) / 2;
        let mass = lattice_mass(h, t);
        let norm = if (mass - 1.0).abs() > 1e-13 { mass } else { 1.0 };
        let weight = |d: f64| -> f64 {
            let k = h * kernel(d, t) / norm;
            match kind {
                Kernel::Value => k,
                Kernel::Derivative => -d / (2.0 * t) * k,
            }
        };

        let circular = q.method != Method::Direct;
        if circular {
            let periodic = q.method == Method::MellinMultiplier;
            let leak = wrap_leakage(n, len, h, t, periodic);
            if leak > LEAKAGE_TOLERANCE {
                return Err(Error::Leakage {
                    leakage: leak,
                    tolerance: LEAKAGE_TOLERANCE,
                });
            }
        }

        let mut plan = Plan {
            count: n,
            spacing: h,
            t,
            method: q.method,
            kind,
            pad_left,
            len,
            weights: Vec::new(),
            fft: None,
            kernel_hat: Vec::new(),
        };
        match q.method {
            Method::Direct => {
                plan.weights = (0..n).map(|d| weight(d as f64 * h)).collect();
            }
            Method::FastConvolution => {
                let fft = Fft::new(len);
                let mut k: Vec<Complex64> = (0..len)
                    .map(|idx| {
                        let d = if idx <= len / 2 { idx as f64 } else { idx as f64 - len as f64 };
                        Complex64::new(weight(d * h), 0.0)
                    })
                    .collect();
                fft.forward(&mut k);
                plan.kernel_hat = k;
                plan.fft = Some(fft);
            }
            Method::MellinMultiplier => {}
        }
        Ok(plan)
    }

    fn apply(&self, values: &[Complex64], out: &mut [Complex64]) -> Result<()> {
        let n = self.count;
        match self.method {
            Method::Direct => {
                let sign = if self.kind == Kernel::Derivative { -1.0 } else { 1.0 };
                for (i, o) in out.iter_mut().enumerate() {
                    let mut acc = Complex64::new(0.0, 0.0);
                    for (k, g) in values.iter().enumerate() {
                        let w = if i >= k {
                            self.weights[i - k]
                        } else {
                            sign * self.weights[k - i]
                        };
                        acc += g * w;
                    }
                    *o = acc;
                }
            }
            Method::FastConvolution => {
                let fft = self.fft.as_ref().expect("fast plan has an fft");
                let mut buf = vec![Complex64::new(0.0, 0.0); self.len];
                buf[..n].copy_from_slice(values);
                fft.forward(&mut buf);
                for (b, k) in buf.iter_mut().zip(&self.kernel_hat) {
                    *b *= k;
                }
                fft.inverse(&mut buf);
                let scale = 1.0 / self.len as f64;
                for (o, b) in out.iter_mut().zip(&buf[..n]) {
                    *o = b * scale;
                }
            }
            Method::MellinMultiplier => {
                let padded = LogRadialGrid::new(
                    -(self.pad_left as f64) * self.spacing,
                    (self.len - 1 - self.pad_left) as f64 * self.spacing,
                    self.len,
                )?;
                let mut data = vec![Complex64::new(0.0, 0.0); self.len];
                data[self.pad_left..self.pad_left + n].copy_from_slice(values);
                let profile = RadialProfile::new(padded, data)?;
                let t = self.t;
                let transformed = mellin::forward_profile(&profile);
                let multiplied = match self.kind {
                    Kernel::Value => transformed.apply_multiplier(|tau| Complex64::new((-t * tau * tau).exp(), 0.0)),
                    Kernel::Derivative => {
                        transformed.apply_multiplier(|tau| Complex64::new(0.0, tau * (-t * tau * tau).exp()))
                    }
                };
                let back = mellin::inverse_profile(&multiplied)?;
                out.copy_from_slice(&back.values()[self.pad_left..self.pad_left + n]);
            }
        }
        Ok(())
    }
}

/// Kernel mass beyond the wrap-around distance of a length-`len` circular
/// convolution of `n` samples, relative to a unit sup-norm input.
fn wrap_leakage(n: usize, len: usize, h: f64, t: f64, periodic: bool) -> f64 {
    if !periodic && len >= 2 * n - 1 {
        return 0.0;
    }
    let gap = (len - n + 1) as f64 * h;
    erfc(gap / (2.0 * t.sqrt()))
}

/// Wrap-around mass a query would incur on `grid` (0 when the convolution is
/// exact).
pub fn leakage(grid: &LogRadialGrid, q: &SemigroupQuery) -> f64 {
    if q.method == Method::Direct {
        return 0.0;
    }
    let n = grid.count();
    let h = grid.spacing();
    let pad = q.pad_width.max(10.0 * h);
    let pad_samples = ((pad / h).ceil() as usize).min(n);
    let len = (n + 2 * pad_samples).next_power_of_two();
    wrap_leakage(n, len, h, q.time, q.method == Method::MellinMultiplier)
}

fn run_slices(
    grid: &LogRadialGrid,
    values: &[Complex64],
    radial: bool,
    q: &SemigroupQuery,
    kind: Kernel,
) -> Result<Vec<Complex64>> {
    if q.extension == Extension::Edge {
        return run_edge(grid, values, radial, q, kind);
    }
    let plan = Plan::new(grid, q, kind)?;
    let n = grid.count();
    let mut out = vec![Complex64::new(0.0, 0.0); values.len()];
    if radial {
        let (first, rest) = out.split_at_mut(n);
        plan.apply(&values[..n], first)?;
        for chunk in rest.chunks_mut(n) {
            chunk.copy_from_slice(first);
        }
    } else {
        for (src, dst) in values.chunks(n).zip(out.chunks_mut(n)) {
            plan.apply(src, dst)?;
        }
    }
    Ok(out)
}

fn run_edge(
    grid: &LogRadialGrid,
    values: &[Complex64],
    radial: bool,
    q: &SemigroupQuery,
    kind: Kernel,
) -> Result<Vec<Complex64>> {
    q.validate()?;
    let n = grid.count();
    let h = grid.spacing();
    let extra = (EDGE_WIDTHS * q.time.sqrt() / h).ceil().max(1.0);
    if extra > EDGE_MAX_SAMPLES as f64 {
        return Err(Error::Leakage {
            leakage: erfc(EDGE_MAX_SAMPLES as f64 * h / (2.0 * q.time.sqrt())) / 2.0,
            tolerance: LEAKAGE_TOLERANCE,
        });
    }
    let extra = extra as usize;
    let wide = grid.extended(extra);
    let inner = SemigroupQuery {
        extension: Extension::Zero,
        ..*q
    };
    let plan = Plan::new(&wide, &inner, kind)?;
    let slices = if radial { 1 } else { values.len() / n };
    let mut src = vec![Complex64::new(0.0, 0.0); wide.count()];
    let mut dst = src.clone();
    let mut out = vec![Complex64::new(0.0, 0.0); values.len()];
    for k in 0..slices {
        let slice = &values[k * n..(k + 1) * n];
        src[..extra].fill(slice[0]);
        src[extra..extra + n].copy_from_slice(slice);
        src[extra + n..].fill(slice[n - 1]);
        plan.apply(&src, &mut dst)?;
        out[k * n..(k + 1) * n].copy_from_slice(&dst[extra..extra + n]);
    }
    if radial {
        let (first, rest) = out.split_at_mut(n);
        for chunk in rest.chunks_mut(n) {
            chunk.copy_from_slice(first);
        }
    }
    Ok(out)
}

/// Data that P_t acts on slice by slice.
pub trait Evolve: Sized {
    fn evolve_with(&self, q: &SemigroupQuery) -> Result<Self>;
}

impl Evolve for RadialProfile {
    fn evolve_with(&self, q: &SemigroupQuery) -> Result<Self> {
        let values = run_slices(self.grid(), self.values(), true, q, Kernel::Value)?;
        RadialProfile::new(*self.grid(), values)
    }
}

impl Evolve for LogField {
    fn evolve_with(&self, q: &SemigroupQuery) -> Result<Self> {
        let values = run_slices(self.grid(), self.values(), self.is_radial(), q, Kernel::Value)?;
        LogField::from_values(*self.grid(), self.sphere().clone(), values, self.is_radial())
    }
}

/// P_t applied to a profile or a cylinder field.
pub fn evolve<T: Evolve>(data: &T, q: &SemigroupQuery) -> Result<T> {
    data.evolve_with(q)
}

/// ∂_s P_t G, by convolution with the differentiated kernel (or the
/// multiplier iτ e^{-tτ²} on the Mellin path).
pub fn evolve_derivative(profile: &RadialProfile, q: &SemigroupQuery) -> Result<RadialProfile> {
    let values = run_slices(profile.grid(), profile.values(), true, q, Kernel::Derivative)?;
    RadialProfile::new(*profile.grid(), values)
}

/// e^{-tL*L} f = e^{-tn²/4} Φ⁻¹ P_t Φ f.
pub fn evolve_l_star_l(f: &ScalarField, q: &SemigroupQuery) -> Result<ScalarField> {
    let g = phi_forward(f)?;
    let n = f.dimension() as f64;
    let damping = (-q.time * n * n / 4.0).exp();
    let evolved = evolve(&g, q)?.scaled(Complex64::new(damping, 0.0));
    phi_inverse(&evolved)
}
