//! Registry of the inequalities and identities, and the certifier that
//! evaluates both sides on a sampled trial function.
//!
//! Every entry is written as `lhs ⋚ rhs`. For entries with an explicit
//! constant `rhs` includes it; for entries with an unspecified constant `rhs`
//! is the constant-free right side, so `ratio = lhs / rhs` is an empirical
//! lower bound for the best constant. `margin` is signed so that a positive
//! value means the inequality holds.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::f64::consts::PI;
use num_complex::Complex64;
#[allow(unused_imports)] // float methods are inherent once std is linked
use num_traits::Float;
use serde::{Deserialize, Serialize};

use crate::deriv::DerivativeScheme;
use crate::error::{Error, Result};
use crate::field::{apply_l, derivative_s, outside_max, phi_forward, LogField, RadialProfile, ScalarField};
use crate::gradient::{gradient_lp_integral, times_radius};
use crate::norms::{
    besov_norm_profile, l2star_radial, lp_integral_rn, lp_norm_cylinder, lq_norm_line, weak_lq, BesovOptions,
    Premultiplier, RadialWeight,
};
use crate::semigroup::{evolve, evolve_derivative, Method, SemigroupQuery};
use crate::special::{critical_exponent, smoothing_linf_constant, sphere_area, stubbe_constant};

/// Named real parameters of one certification (n, p, q, t, δ, ε, R, Λ and
/// diagnostics added by the certifier).
pub type Params = BTreeMap<String, f64>;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Kind {
    Inequality,
    Identity,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    /// lhs ≤ rhs
    UpperBound,
    /// lhs ≥ rhs
    LowerBound,
    Equality,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ConstantKind {
    Explicit,
    Unspecified,
    None,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Holds,
    Violated,
    IdentityOk,
    IdentityFail,
    /// Unspecified constant: the ratio is an empirical lower bound.
    Empirical,
    /// Printed constant fails where the statement is flagged as doubtful.
    Anomaly,
}

impl Verdict {
    /// True for outcomes that make a verification run fail.
    pub fn is_failure(self) -> bool {
        matches!(self, Verdict::Violated | Verdict::IdentityFail)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct InequalityDefinition {
    pub id: &'static str,
    pub kind: Kind,
    pub direction: Direction,
    pub constant: ConstantKind,
    /// Formula of the explicit constant, empty otherwise.
    pub constant_formula: &'static str,
    pub lhs: &'static str,
    pub rhs: &'static str,
    /// Parameters read from the parameter map besides n.
    pub parameters: &'static [&'static str],
    pub min_dimension: usize,
    /// Short descriptive name of the statement.
    pub anchor: &'static str,
}

macro_rules! entry {
    ($id:literal, $kind:ident, $dir:ident, $constant:ident, $formula:literal, $lhs:literal, $rhs:literal, [$($p:literal),*], $min_n:literal, $anchor:literal) => {
        InequalityDefinition {
            id: $id,
            kind: Kind::$kind,
            direction: Direction::$dir,
            constant: ConstantKind::$constant,
            constant_formula: $formula,
            lhs: $lhs,
            rhs: $rhs,
            parameters: &[$($p),*],
            min_dimension: $min_n,
            anchor: $anchor,
        }
    };
}

static REGISTRY: [InequalityDefinition; 23] = [
    entry!("hardy_classical", Inequality, LowerBound, Explicit, "((n-p)/p)^p",
        "∫|∇f|^p dx", "C ∫|f|^p/|x|^p dx", ["p"], 1, "classical Hardy inequality"),
    entry!("hardy_dilation", Inequality, LowerBound, Explicit, "(n/p)^p",
        "∫|(x·∇)f|^p dx", "C ∫|f|^p dx", ["p"], 1, "Hardy inequality for the dilation generator"),
    entry!("hardy_chain", Inequality, LowerBound, Explicit, "(n-p)/p",
        "‖∇(|x|f)‖_p", "C ‖f‖_p", ["p"], 1, "Hardy inequality through the dilation chain"),
    entry!("ibp_identity", Identity, Equality, None, "",
        "2 Re ∫ conj(f) (x·∇)f dx", "-n ∫|f|² dx", [], 1, "integration by parts for x·∇"),
    entry!("grad_identity", Identity, Equality, None, "",
        "∫|∇(|x|f)|² dx", "∫(|x||∇f|)² dx - (n-1) ∫|f|² dx", [], 1, "gradient of |x|f"),
    entry!("smoothing_linf", Inequality, UpperBound, Explicit, "(4π)^{-1/2p} (p')^{-1/2p'} t^{-1/2p}",
        "‖P_t G‖_∞", "C ‖G‖_p", ["p", "t"], 1, "L^p to L^∞ smoothing of P_t"),
    entry!("smoothing_deriv", Inequality, UpperBound, Explicit, "(πt)^{-1/2}",
        "‖∂_s P_t G‖_p", "C ‖G‖_p", ["p", "t"], 1, "derivative smoothing of P_t"),
    entry!("pseudo_poincare", Inequality, UpperBound, Explicit, "2 π^{-1/2} t^{1/2}",
        "‖P_t g - g‖_p", "C ‖∂_s g‖_p", ["p", "t"], 1, "pseudo-Poincaré inequality"),
    entry!("main_weak", Inequality, UpperBound, Explicit, "2^{θ+1} π^{-θ/2} |S^{n-1}|^{-1}",
        "‖G‖_{q,∞}", "C ‖∂_s g‖_p^θ ‖g‖_{B^{θ/(θ-1)}}^{1-θ}", ["p", "q"], 1, "weak-type form of the main inequality"),
    entry!("main_strong", Inequality, UpperBound, Unspecified, "",
        "‖G‖_q", "‖∂_s g‖_p^θ ‖g‖_{B^{θ/(θ-1)}}^{1-θ}", ["p", "q"], 1, "main inequality for the spherical mean"),
    entry!("sobolev_mean", Inequality, UpperBound, Unspecified, "",
        "‖G‖_{p*}", "‖∂_s g‖_p^{1/n} ‖g‖_p^{(n-1)/n}", ["p"], 2, "Sobolev-type inequality for the spherical mean"),
    entry!("sobolev_mean_q", Inequality, UpperBound, Unspecified, "",
        "‖G‖_{p(p+1)}", "‖∂_s g‖_p^{1/(p+1)} ‖g‖_p^{p/(p+1)}", ["p"], 1, "intermediate exponent q = p(p+1)"),
    entry!("sobolev_compact", Inequality, UpperBound, Unspecified, "",
        "‖G‖_{p*}", "Λ^{(n-1)/n} ‖∂_s g‖_p", ["p", "lambda"], 2, "Sobolev-type inequality for compact support"),
    entry!("gagliardo_nirenberg", Inequality, UpperBound, Unspecified, "",
        "‖G‖_q", "‖∂_s g‖_p^{p/q} ‖g‖_m^{1-p/q}", ["p", "q"], 1, "Gagliardo-Nirenberg-type inequality, m = q/p - 1"),
    entry!("main_p2", Inequality, UpperBound, Unspecified, "",
        "‖rF‖²_{L^{2*}(dμ)}", "{‖Lf‖² - n²/4 ‖f‖²}^{1/n} ‖f‖^{2(1-1/n)}", [], 3, "p = 2 form with the dilation generator"),
    entry!("hardy_sobolev", Inequality, UpperBound, Unspecified, "",
        "‖M(h)‖²_{L^{2*}(dμ)}", "{‖∇h‖² - ((n-2)/2)² ‖h/|x|‖²}^{1/n} {‖h/|x|‖²}^{1-1/n}", [], 3, "Hardy-Sobolev inequality for the spherical mean"),
    entry!("hardy_sobolev_eps", Inequality, UpperBound, Unspecified, "",
        "ε^{1-1/n} ‖M(h)‖²_{L^{2*}(dμ)}", "‖∇h‖² - [((n-2)/2)² - ε] ‖h/|x|‖²", ["eps"], 3, "Hardy-Sobolev inequality with parameter ε"),
    entry!("stubbe_pre", Inequality, UpperBound, Unspecified, "",
        "‖F‖²_{L^{2*}(dμ)}", "[(n-2)²/4 - δ]^{-(n-1)/n} {‖∇f‖² - δ ‖f/|x|‖²}", ["delta"], 3, "Sobolev inequality with Hardy remainder, spherical mean"),
    entry!("stubbe", Inequality, UpperBound, Explicit, "K(n) = [πn(n-2)]^{-1} (Γ(n)/Γ(n/2))^{2/n} [(n-2)²/4]^{(n-1)/n}",
        "‖f‖²_{L^{2*}(ℝⁿ)}", "C [(n-2)²/4 - δ]^{-(n-1)/n} {‖∇f‖² - δ ‖f/|x|‖²}", ["delta"], 3, "Sobolev inequality with Hardy remainder"),
    entry!("annulus_L", Inequality, UpperBound, Unspecified, "",
        "‖rF‖²_{L^{2*}(dμ)}", "(ln R)^{2(n-1)/n} {‖Lf‖² - n²/4 ‖f‖²}", ["R"], 3, "annulus form with the dilation generator"),
    entry!("annulus_grad", Inequality, UpperBound, Unspecified, "",
        "‖M(h)‖²_{L^{2*}(dμ)}", "(ln R)^{2(n-1)/n} {‖∇h‖² - (n-2)²/4 ‖h/|x|‖²}", ["R"], 3, "annulus form with the gradient"),
    entry!("weighted_gn", Inequality, UpperBound, Unspecified, "",
        "‖G‖_q^q", "{‖Lf‖² - n²/4 ‖f‖²} {‖Φf‖_m^m}², m = q/2 - 1", ["q"], 1, "p = 2 Gagliardo-Nirenberg-type inequality with radial weights"),
    entry!("mod_hardy_L_bound", Inequality, LowerBound, Explicit, "1",
        "∫|∇(|x|f)|² dx", "∫|Lf|² dx - (n-1) ∫|f|² dx", [], 1, "lower bound for the gradient of |x|f"),
];

/// All registered entries, in a fixed order.
pub fn registry() -> &'static [InequalityDefinition] {
    &REGISTRY
}

pub fn lookup(id: &str) -> Result<&'static InequalityDefinition> {
    REGISTRY
        .iter()
        .find(|d| d.id == id)
        .ok_or_else(|| Error::UnknownInequality(id.to_string()))
}

fn param(params: &Params, name: &'static str) -> Result<f64> {
    let v = *params.get(name).ok_or(Error::MissingParameter(name))?;
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::ParameterDomain {
            name,
            value: v,
            reason: "must be finite",
        })
    }
}

fn domain(name: &'static str, value: f64, ok: bool, reason: &'static str) -> Result<()> {
    if ok {
        Ok(())
    } else {
        Err(Error::ParameterDomain { name, value, reason })
    }
}

/// δ from either `delta` or `delta_fraction` (a fraction of (n-2)²/4).
fn delta(params: &Params, n: usize) -> Result<f64> {
    let top = (n as f64 - 2.0).powi(2) / 4.0;
    let d = match params.get("delta") {
        Some(_) => param(params, "delta")?,
        None => param(params, "delta_fraction").map_err(|_| Error::MissingParameter("delta"))? * top,
    };
    domain("delta", d, d >= 0.0 && d < top, "δ must lie in [0, (n-2)²/4)")?;
    Ok(d)
}

/// θ = p/q and α = θ/(θ-1) for the B^α based entries.
fn theta_alpha(params: &Params) -> Result<(f64, f64, f64, f64)> {
    let p = param(params, "p")?;
    let q = param(params, "q")?;
    domain("p", p, p >= 1.0, "p must be at least 1")?;
    domain("q", q, q > 2.0 * p, "the B^α norm is finite only for q > 2p")?;
    let theta = p / q;
    Ok((p, q, theta, theta / (theta - 1.0)))
}

impl InequalityDefinition {
    /// Checks n and every parameter the entry reads.
    pub fn check_domain(&self, n: usize, params: &Params) -> Result<()> {
        domain("n", n as f64, n >= self.min_dimension, "dimension below the entry's minimum")?;
        for &name in self.parameters {
            match name {
                "p" => {
                    let p = param(params, "p")?;
                    domain("p", p, p >= 1.0, "p must be at least 1")?;
                    match self.id {
                        "hardy_classical" | "hardy_chain" => {
                            domain("p", p, p <= n as f64, "requires p ≤ n")?
                        }
                        "sobolev_mean" | "sobolev_compact" => domain("p", p, p < n as f64, "requires p < n")?,
                        _ => {}
                    }
                }
                "q" => {
                    let q = param(params, "q")?;
                    match self.id {
                        "main_weak" | "main_strong" => {
                            theta_alpha(params)?;
                        }
                        "gagliardo_nirenberg" => {
                            let p = param(params, "p")?;
                            domain("q", q, q >= 2.0 * p, "requires m = q/p - 1 ≥ 1")?;
                        }
                        "weighted_gn" => domain("q", q, q >= 4.0, "requires m = q/2 - 1 ≥ 1")?,
                        _ => {}
                    }
                }
                "t" => {
                    let t = param(params, "t")?;
                    SemigroupQuery::new(t, Method::FastConvolution)?;
                }
                "delta" => {
                    delta(params, n)?;
                }
                "eps" => {
                    let e = param(params, "eps")?;
                    domain("eps", e, e > 0.0, "ε must be positive")?;
                }
                "R" => {
                    let r = param(params, "R")?;
                    domain("R", r, r > 1.0, "R must exceed 1")?;
                }
                "lambda" => {
                    let l = param(params, "lambda")?;
                    domain("lambda", l, l > 0.0, "Λ must be positive")?;
                }
                _ => {}
            }
        }
        Ok(())
    }

    /// Value of the explicit constant, `None` for other entries.
    pub fn constant_value(&self, n: usize, params: &Params) -> Result<Option<f64>> {
        if self.constant != ConstantKind::Explicit {
            return Ok(None);
        }
        let nf = n as f64;
        let c = match self.id {
            "hardy_classical" => {
                let p = param(params, "p")?;
                ((nf - p) / p).powf(p)
            }
            "hardy_dilation" => {
                let p = param(params, "p")?;
                (nf / p).powf(p)
            }
            "hardy_chain" => {
                let p = param(params, "p")?;
                (nf - p) / p
            }
            "smoothing_linf" => {
                let p = param(params, "p")?;
                let t = param(params, "t")?;
                smoothing_linf_constant(p) * t.powf(-1.0 / (2.0 * p))
            }
            "smoothing_deriv" => (PI * param(params, "t")?).powf(-0.5),
            "pseudo_poincare" => 2.0 * (param(params, "t")? / PI).sqrt(),
            "main_weak" => {
                let (_, _, theta, _) = theta_alpha(params)?;
                2f64.powf(theta + 1.0) * PI.powf(-theta / 2.0) / sphere_area(n)
            }
            "stubbe" => stubbe_constant(n),
            "mod_hardy_L_bound" => 1.0,
            _ => unreachable!("explicit constant without a formula"),
        };
        Ok(Some(c))
    }
}

/// Description of the trial function a record was computed on.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct TrialDescriptor {
    pub family: String,
    pub index: usize,
    pub parameters: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CertificateRecord {
    pub id: String,
    pub params: Params,
    pub trial: TrialDescriptor,
    pub lhs: f64,
    pub rhs: f64,
    pub ratio: f64,
    pub margin: f64,
    pub verdict: Verdict,
    pub tolerance: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Tolerances {
    /// Relative tolerance on |lhs - rhs| for identities.
    pub identity: f64,
    /// Allowed negative margin, relative to |rhs|, for explicit constants.
    pub inequality: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            identity: 1e-10,
            inequality: 1e-9,
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct CertifyOptions {
    pub scheme: DerivativeScheme,
    pub tolerances: Tolerances,
    pub besov: BesovOptions,
    pub method: Method,
}

/// Largest sample magnitude allowed outside a declared support.
pub const SUPPORT_THRESHOLD: f64 = 1e-13;

/// Lazily computed quantities shared between the two sides of an entry.
struct Trial<'a> {
    f: &'a ScalarField,
    scheme: DerivativeScheme,
    g: Option<LogField>,
    mean_g: Option<RadialProfile>,
    ds_g: Option<LogField>,
}

impl<'a> Trial<'a> {
    fn new(f: &'a ScalarField, scheme: DerivativeScheme) -> Self {
        Self {
            f,
            scheme,
            g: None,
            mean_g: None,
            ds_g: None,
        }
    }

    fn n(&self) -> usize {
        self.f.dimension()
    }

    fn g(&mut self) -> Result<&LogField> {
        if self.g.is_none() {
            self.g = Some(phi_forward(self.f)?);
        }
        Ok(self.g.as_ref().unwrap())
    }

    /// G = 𝓜(Φf).
    fn mean_g(&mut self) -> Result<&RadialProfile> {
        if self.mean_g.is_none() {
            let m = self.g()?.spherical_mean()?;
            self.mean_g = Some(m);
        }
        Ok(self.mean_g.as_ref().unwrap())
    }

    fn ds_g(&mut self) -> Result<&LogField> {
        if self.ds_g.is_none() {
            let scheme = self.scheme;
            let d = derivative_s(self.g()?, scheme)?;
            self.ds_g = Some(d);
        }
        Ok(self.ds_g.as_ref().unwrap())
    }

    /// ‖Af‖² = ‖∂_s Φf‖², equal to ‖Lf‖² - n²/4 ‖f‖².
    fn generator_energy(&mut self) -> Result<f64> {
        Ok(lp_norm_cylinder(self.ds_g()?, 2.0)?.powi(2))
    }

    fn l2_sq(&self) -> Result<f64> {
        lp_integral_rn(self.f, 2.0, RadialWeight::One)
    }

    fn hardy_sq(&self) -> Result<f64> {
        lp_integral_rn(self.f, 2.0, RadialWeight::InversePower)
    }

    fn dirichlet(&self) -> Result<f64> {
        gradient_lp_integral(self.f, 2.0, self.scheme)
    }

    fn spherical_mean_f(&self) -> Result<RadialProfile> {
        self.f.spherical_mean()
    }
}

/// sign(x)|x|^e, so that slightly negative round-off stays visible.
fn signed_pow(x: f64, e: f64) -> f64 {
    x.signum() * x.abs().powf(e)
}

struct Evaluation {
    lhs: f64,
    /// Constant-free right side.
    core: f64,
    diagnostics: Vec<(&'static str, f64)>,
}

impl Evaluation {
    fn plain(lhs: f64, core: f64) -> Self {
        Self {
            lhs,
            core,
            diagnostics: Vec::new(),
        }
    }
}

fn check_support(field_max: Option<(f64, f64)>, limit: f64) -> Result<()> {
    match field_max {
        Some((magnitude, s)) if magnitude >= SUPPORT_THRESHOLD => Err(Error::SupportViolation { magnitude, s, limit }),
        _ => Ok(()),
    }
}

fn evaluate(def: &InequalityDefinition, trial: &mut Trial, params: &Params, options: &CertifyOptions) -> Result<Evaluation> {
    let n = trial.n();
    let nf = n as f64;
    let scheme = trial.scheme;
    let f = trial.f;
    let eval = match def.id {
        "hardy_classical" => {
            let p = param(params, "p")?;
            Evaluation::plain(
                gradient_lp_integral(f, p, scheme)?,
                lp_integral_rn(f, p, RadialWeight::InversePower)?,
            )
        }
        "hardy_dilation" => {
            let p = param(params, "p")?;
            let lf = apply_l(f, scheme)?;
            Evaluation::plain(
                lp_integral_rn(&lf, p, RadialWeight::One)?,
                lp_integral_rn(f, p, RadialWeight::One)?,
            )
        }
        "hardy_chain" => {
            let p = param(params, "p")?;
            let rf = times_radius(f);
            Evaluation::plain(
                gradient_lp_integral(&rf, p, scheme)?.powf(1.0 / p),
                lp_integral_rn(f, p, RadialWeight::One)?.powf(1.0 / p),
            )
        }
        "ibp_identity" => {
            let lf = apply_l(f, scheme)?;
            let cross = weighted_inner(f, &lf);
            Evaluation::plain(2.0 * cross, -nf * trial.l2_sq()?)
        }
        "grad_identity" => {
            let rf = times_radius(f);
            let lhs = gradient_lp_integral(&rf, 2.0, scheme)?;
            let weighted = trial.dirichlet_weighted()?;
            Evaluation::plain(lhs, weighted - (nf - 1.0) * trial.l2_sq()?)
        }
        "mod_hardy_L_bound" => {
            let rf = times_radius(f);
            let lhs = gradient_lp_integral(&rf, 2.0, scheme)?;
            let lf = apply_l(f, scheme)?;
            let l_sq = lp_integral_rn(&lf, 2.0, RadialWeight::One)?;
            Evaluation::plain(lhs, l_sq - (nf - 1.0) * trial.l2_sq()?)
        }
        "smoothing_linf" => {
            let p = param(params, "p")?;
            let t = param(params, "t")?;
            let q = SemigroupQuery::new(t, options.method)?;
            let big_g = trial.mean_g()?;
            Evaluation::plain(evolve(big_g, &q)?.max_abs(), lq_norm_line(big_g, p)?)
        }
        "smoothing_deriv" => {
            let p = param(params, "p")?;
            let t = param(params, "t")?;
            let q = SemigroupQuery::new(t, options.method)?;
            let big_g = trial.mean_g()?;
            Evaluation::plain(lq_norm_line(&evolve_derivative(big_g, &q)?, p)?, lq_norm_line(big_g, p)?)
        }
        "pseudo_poincare" => {
            let p = param(params, "p")?;
            let t = param(params, "t")?;
            let q = SemigroupQuery::new(t, options.method)?;
            let g = trial.g()?.clone();
            let evolved = evolve(&g, &q)?;
            let diff: Vec<Complex64> = evolved.values().iter().zip(g.values()).map(|(a, b)| a - b).collect();
            let diff = LogField::from_values(*g.grid(), g.sphere().clone(), diff, g.is_radial())?;
            Evaluation::plain(lp_norm_cylinder(&diff, p)?, lp_norm_cylinder(trial.ds_g()?, p)?)
        }
        "main_weak" | "main_strong" => {
            let (p, q, theta, alpha) = theta_alpha(params)?;
            let big_g = trial.mean_g()?.clone();
            let besov = besov_norm_profile(&big_g, alpha, &options.besov)?;
            let deriv = lp_norm_cylinder(trial.ds_g()?, p)?;
            let core = deriv.powf(theta) * besov.value.powf(1.0 - theta);
            let mut eval = if def.id == "main_weak" {
                Evaluation::plain(weak_lq(&big_g, q)?, core)
            } else {
                Evaluation::plain(lq_norm_line(&big_g, q)?, core)
            };
            eval.diagnostics.push(("besov_norm", besov.value));
            eval.diagnostics.push(("besov_t_star", besov.t_star));
            if def.id == "main_weak" {
                let derivable = 2.0 * (2f64.powf(p) * PI.powf(-p / 2.0) / sphere_area(n)).powf(theta / p);
                eval.diagnostics.push(("constant_derivable", derivable));
                eval.diagnostics.push(("rhs_derivable", derivable * core));
                eval.diagnostics.push(("margin_derivable", derivable * core - eval.lhs));
            }
            eval
        }
        "sobolev_mean" => {
            let p = param(params, "p")?;
            let p_star = nf * p / (nf - p);
            let lhs = lq_norm_line(trial.mean_g()?, p_star)?;
            let deriv = lp_norm_cylinder(trial.ds_g()?, p)?;
            let base = lp_norm_cylinder(trial.g()?, p)?;
            let mut eval = Evaluation::plain(lhs, deriv.powf(1.0 / nf) * base.powf((nf - 1.0) / nf));
            eval.diagnostics.push(("p_star", p_star));
            eval
        }
        "sobolev_mean_q" => {
            let p = param(params, "p")?;
            let lhs = lq_norm_line(trial.mean_g()?, p * (p + 1.0))?;
            let deriv = lp_norm_cylinder(trial.ds_g()?, p)?;
            let base = lp_norm_cylinder(trial.g()?, p)?;
            Evaluation::plain(lhs, deriv.powf(1.0 / (p + 1.0)) * base.powf(p / (p + 1.0)))
        }
        "sobolev_compact" => {
            let p = param(params, "p")?;
            let lambda = param(params, "lambda")?;
            let big_g = trial.mean_g()?;
            check_support(big_g.max_outside(lambda), lambda)?;
            let p_star = nf * p / (nf - p);
            let lhs = lq_norm_line(big_g, p_star)?;
            let deriv = lp_norm_cylinder(trial.ds_g()?, p)?;
            Evaluation::plain(lhs, lambda.powf((nf - 1.0) / nf) * deriv)
        }
        "gagliardo_nirenberg" => {
            let p = param(params, "p")?;
            let q = param(params, "q")?;
            let m = q / p - 1.0;
            let lhs = lq_norm_line(trial.mean_g()?, q)?;
            let deriv = lp_norm_cylinder(trial.ds_g()?, p)?;
            let base = lp_norm_cylinder(trial.g()?, m)?;
            let mut eval = Evaluation::plain(lhs, deriv.powf(p / q) * base.powf(1.0 - p / q));
            eval.diagnostics.push(("m", m));
            eval
        }
        "main_p2" => {
            let lhs = l2star_radial(&trial.spherical_mean_f()?, n, Premultiplier::Radius)?.powi(2);
            let x = trial.generator_energy()?;
            let norm_sq = trial.l2_sq()?;
            Evaluation::plain(lhs, signed_pow(x, 1.0 / nf) * norm_sq.powf(1.0 - 1.0 / nf))
        }
        "hardy_sobolev" | "hardy_sobolev_eps" => {
            let lhs_mean = l2star_radial(&trial.spherical_mean_f()?, n, Premultiplier::One)?.powi(2);
            let y = trial.hardy_sq()?;
            let hardy = (nf - 2.0).powi(2) / 4.0;
            let x = trial.dirichlet()? - hardy * y;
            if def.id == "hardy_sobolev" {
                Evaluation::plain(lhs_mean, signed_pow(x, 1.0 / nf) * y.powf(1.0 - 1.0 / nf))
            } else {
                let eps = param(params, "eps")?;
                let mut eval = Evaluation::plain(eps.powf(1.0 - 1.0 / nf) * lhs_mean, x + eps * y);
                let eps_star = (nf - 1.0) * x / y;
                let ratio_star = if eps_star > 0.0 {
                    eps_star.powf(1.0 - 1.0 / nf) * lhs_mean / (x + eps_star * y)
                } else {
                    f64::NAN
                };
                let base_ratio = lhs_mean / (signed_pow(x, 1.0 / nf) * y.powf(1.0 - 1.0 / nf));
                eval.diagnostics.push(("eps_star", eps_star));
                eval.diagnostics.push(("ratio_sup_eps", ratio_star));
                eval.diagnostics.push((
                    "ratio_sup_predicted",
                    (nf - 1.0).powf(1.0 - 1.0 / nf) / nf * base_ratio,
                ));
                eval
            }
        }
        "stubbe_pre" | "stubbe" => {
            let d = delta(params, n)?;
            let top = (nf - 2.0).powi(2) / 4.0;
            let core = (top - d).powf(-(nf - 1.0) / nf) * (trial.dirichlet()? - d * trial.hardy_sq()?);
            let lhs = if def.id == "stubbe" {
                let two_star = critical_exponent(n).expect("n >= 3");
                lp_integral_rn(f, two_star, RadialWeight::One)?.powf(2.0 / two_star)
            } else {
                l2star_radial(&trial.spherical_mean_f()?, n, Premultiplier::One)?.powi(2)
            };
            let mut eval = Evaluation::plain(lhs, core);
            eval.diagnostics.push(("delta", d));
            eval
        }
        "annulus_L" | "annulus_grad" => {
            let r = param(params, "R")?;
            let limit = r.ln();
            check_support(outside_max(f.grid(), f.slices(), limit), limit)?;
            let scale = limit.powf(2.0 * (nf - 1.0) / nf);
            if def.id == "annulus_L" {
                let lhs = l2star_radial(&trial.spherical_mean_f()?, n, Premultiplier::Radius)?.powi(2);
                Evaluation::plain(lhs, scale * trial.generator_energy()?)
            } else {
                let lhs = l2star_radial(&trial.spherical_mean_f()?, n, Premultiplier::One)?.powi(2);
                let x = trial.dirichlet()? - (nf - 2.0).powi(2) / 4.0 * trial.hardy_sq()?;
                Evaluation::plain(lhs, scale * x)
            }
        }
        "weighted_gn" => {
            let q = param(params, "q")?;
            let m = q / 2.0 - 1.0;
            let lhs = lq_norm_line(trial.mean_g()?, q)?.powf(q);
            let x = trial.generator_energy()?;
            let y = lp_norm_cylinder(trial.g()?, m)?.powf(m);
            let mut eval = Evaluation::plain(lhs, x * y * y);
            eval.diagnostics.push(("m", m));
            eval.diagnostics.push(("ratio_printed", lhs / (x * x * y * y)));
            eval
        }
        other => return Err(Error::UnknownInequality(other.to_string())),
    };
    Ok(eval)
}

impl Trial<'_> {
    /// ∫(|x||∇f|)² dx.
    fn dirichlet_weighted(&self) -> Result<f64> {
        lp_integral_rn(&crate::gradient::scaled_gradient(self.f, self.scheme)?, 2.0, RadialWeight::One)
    }
}

/// Re ∫ conj(f) h dx.
fn weighted_inner(f: &ScalarField, h: &ScalarField) -> f64 {
    let grid = f.grid();
    let n = f.dimension() as f64;
    let growth: Vec<f64> = grid.points().map(|s| (n * s).exp()).collect();
    f.slices()
        .zip(h.slices())
        .zip(f.sphere().weights())
        .map(|((a, b), w)| {
            w * a
                .iter()
                .zip(b)
                .zip(&growth)
                .map(|((x, y), e)| (x.conj() * y).re * e)
                .sum::<f64>()
        })
        .sum::<f64>()
        * grid.spacing()
}

/// Evaluates one entry on `f` with default options.
pub fn certify(id: &str, f: &ScalarField, params: &Params) -> Result<CertificateRecord> {
    certify_with(id, f, params, &CertifyOptions::default(), TrialDescriptor::default())
}

pub fn certify_with(
    id: &str,
    f: &ScalarField,
    params: &Params,
    options: &CertifyOptions,
    trial: TrialDescriptor,
) -> Result<CertificateRecord> {
    let def = lookup(id)?;
    let n = f.dimension();
    def.check_domain(n, params)?;
    if f.is_zero() {
        return Err(Error::NullFunction);
    }
    let mut state = Trial::new(f, options.scheme);
    let eval = evaluate(def, &mut state, params, options)?;
    let constant = def.constant_value(n, params)?;
    let rhs = constant.map_or(eval.core, |c| c * eval.core);
    let lhs = eval.lhs;
    let ratio = lhs / rhs;
    let tol = &options.tolerances;
    let (margin, verdict, tolerance) = match def.direction {
        Direction::Equality => {
            let gap = (lhs - rhs).abs();
            let ok = gap <= tol.identity * lhs.abs().max(rhs.abs());
            (gap, if ok { Verdict::IdentityOk } else { Verdict::IdentityFail }, tol.identity)
        }
        dir => {
            let margin = if dir == Direction::UpperBound { rhs - lhs } else { lhs - rhs };
            let verdict = match def.constant {
                ConstantKind::Explicit => {
                    if margin >= -tol.inequality * rhs.abs() {
                        Verdict::Holds
                    } else if def.id == "main_weak" {
                        Verdict::Anomaly
                    } else {
                        Verdict::Violated
                    }
                }
                _ => Verdict::Empirical,
            };
            (margin, verdict, tol.inequality)
        }
    };
    let mut out = params.clone();
    out.insert("n".to_string(), n as f64);
    if let Some(c) = constant {
        out.insert("constant".to_string(), c);
    }
    for (k, v) in eval.diagnostics {
        out.insert(k.to_string(), v);
    }
    Ok(CertificateRecord {
        id: def.id.to_string(),
        params: out,
        trial,
        lhs,
        rhs,
        ratio,
        margin,
        verdict,
        tolerance,
    })
}

/// Values tried for each named parameter; each entry uses the cross product
/// of the lists it reads.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParamGrid {
    #[serde(default = "ParamGrid::default_p")]
    pub p: Vec<f64>,
    #[serde(default = "ParamGrid::default_q")]
    pub q: Vec<f64>,
    #[serde(default = "ParamGrid::default_t")]
    pub t: Vec<f64>,
    /// δ as a fraction of (n-2)²/4.
    #[serde(default = "ParamGrid::default_delta")]
    pub delta_fraction: Vec<f64>,
    #[serde(default = "ParamGrid::default_eps")]
    pub eps: Vec<f64>,
    #[serde(default = "ParamGrid::default_r", rename = "R")]
    pub radius: Vec<f64>,
    #[serde(default = "ParamGrid::default_lambda")]
    pub lambda: Vec<f64>,
}

impl ParamGrid {
    fn default_p() -> Vec<f64> {
        alloc::vec![2.0]
    }
    fn default_q() -> Vec<f64> {
        alloc::vec![8.0]
    }
    fn default_t() -> Vec<f64> {
        alloc::vec![0.5]
    }
    fn default_delta() -> Vec<f64> {
        alloc::vec![0.5]
    }
    fn default_eps() -> Vec<f64> {
        alloc::vec![0.5]
    }
    fn default_r() -> Vec<f64> {
        alloc::vec![4f64.exp()]
    }
    fn default_lambda() -> Vec<f64> {
        alloc::vec![4.0]
    }

    fn values(&self, name: &str) -> &[f64] {
        match name {
            "p" => &self.p,
            "q" => &self.q,
            "t" => &self.t,
            "delta" => &self.delta_fraction,
            "eps" => &self.eps,
            "R" => &self.radius,
            "lambda" => &self.lambda,
            _ => &[],
        }
    }

    /// Parameter maps for one entry, in lexicographic order of the lists.
    pub fn combinations(&self, def: &InequalityDefinition) -> Vec<Params> {
        let mut out = alloc::vec![Params::new()];
        for &name in def.parameters {
            let key = if name == "delta" { "delta_fraction" } else { name };
            let mut next = Vec::new();
            for base in &out {
                for &v in self.values(name) {
                    let mut p = base.clone();
                    p.insert(key.to_string(), v);
                    next.push(p);
                }
            }
            out = next;
        }
        out
    }
}

impl Default for ParamGrid {
    fn default() -> Self {
        Self {
            p: Self::default_p(),
            q: Self::default_q(),
            t: Self::default_t(),
            delta_fraction: Self::default_delta(),
            eps: Self::default_eps(),
            radius: Self::default_r(),
            lambda: Self::default_lambda(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Skip {
    pub id: String,
    pub trial: TrialDescriptor,
    pub params: Params,
    pub reason: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SuiteEntry {
    Record(CertificateRecord),
    Skipped(Skip),
}

/// Cross product ids × trials × parameter combinations. Unknown ids fail the
/// whole call; per-record errors become skips. Output order is (id, trial,
/// parameter combination).
pub fn certify_suite(
    ids: &[&str],
    trials: &[(TrialDescriptor, ScalarField)],
    grid: &ParamGrid,
    options: &CertifyOptions,
) -> Result<Vec<SuiteEntry>> {
    let defs: Vec<&InequalityDefinition> = ids.iter().map(|id| lookup(id)).collect::<Result<_>>()?;
    let mut out = Vec::new();
    for def in defs {
        for (descriptor, field) in trials {
            for params in grid.combinations(def) {
                match certify_with(def.id, field, &params, options, descriptor.clone()) {
                    Ok(r) => out.push(SuiteEntry::Record(r)),
                    Err(e) => out.push(SuiteEntry::Skipped(Skip {
                        id: def.id.to_string(),
                        trial: descriptor.clone(),
                        params,
                        reason: format!("{e}"),
                    })),
                }
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::LogRadialGrid;
    use crate::sphere::make_spherical_quadrature;
    use alloc::sync::Arc;

    fn gaussian3() -> ScalarField {
        let sphere = Arc::new(make_spherical_quadrature(3, 2).unwrap());
        ScalarField::from_radial_fn(LogRadialGrid::default(), sphere, |r| Complex64::new((-r * r / 2.0).exp(), 0.0))
            .unwrap()
    }

    fn p2() -> Params {
        let mut p = Params::new();
        p.insert("p".into(), 2.0);
        p
    }

    #[test]
    fn registry_has_every_entry_once() {
        assert_eq!(registry().len(), 23);
        for (i, a) in registry().iter().enumerate() {
            assert!(registry()[i + 1..].iter().all(|b| b.id != a.id));
        }
        assert!(lookup("nope").is_err());
    }

    #[test]
    fn dilation_constant_and_gaussian_ratio() {
        let def = lookup("hardy_dilation").unwrap();
        assert_eq!(def.constant_value(3, &p2()).unwrap(), Some(2.25));
        let r = certify("hardy_dilation", &gaussian3(), &p2()).unwrap();
        assert_eq!(r.verdict, Verdict::Holds);
        assert!((r.ratio - 5.0 / 3.0).abs() < 1e-8);
    }

    #[test]
    fn classical_hardy_gaussian() {
        // |f|²/|x|² decays like e^{s} toward the origin, so the grid reaches s = -40
        let sphere = Arc::new(make_spherical_quadrature(3, 2).unwrap());
        let grid = LogRadialGrid::new(-40.0, 12.0, 8192).unwrap();
        let f = ScalarField::from_radial_fn(grid, sphere, |r| Complex64::new((-r * r / 2.0).exp(), 0.0)).unwrap();
        let r = certify("hardy_classical", &f, &p2()).unwrap();
        assert!((r.ratio - 3.0).abs() < 1e-8, "{}", r.ratio);
        assert_eq!(r.verdict, Verdict::Holds);
    }

    #[test]
    fn identities_on_gaussian() {
        for id in ["ibp_identity", "grad_identity"] {
            let r = certify(id, &gaussian3(), &Params::new()).unwrap();
            assert_eq!(r.verdict, Verdict::IdentityOk, "{id}: {r:?}");
        }
    }

    #[test]
    fn zero_field_and_domain_errors() {
        let sphere = Arc::new(make_spherical_quadrature(3, 2).unwrap());
        let zero = ScalarField::from_radial_fn(LogRadialGrid::default(), sphere, |_| Complex64::new(0.0, 0.0)).unwrap();
        assert_eq!(certify("hardy_dilation", &zero, &p2()).unwrap_err(), Error::NullFunction);
        assert_eq!(
            certify("hardy_dilation", &gaussian3(), &Params::new()).unwrap_err(),
            Error::MissingParameter("p")
        );
        let mut bad = Params::new();
        bad.insert("p".into(), 2.0);
        bad.insert("q".into(), 3.0);
        assert!(matches!(
            certify("main_strong", &gaussian3(), &bad),
            Err(Error::ParameterDomain { name: "q", .. })
        ));
    }

    #[test]
    fn stubbe_constant_in_record() {
        let mut p = Params::new();
        p.insert("delta".into(), 0.0);
        let r = certify("stubbe", &gaussian3(), &p).unwrap();
        assert!((r.params["constant"] - 0.072446).abs() < 1e-6);
        assert_eq!(r.verdict, Verdict::Holds);
    }

    #[test]
    fn suite_cardinality_and_empty_trials() {
        let ids: Vec<&str> = registry().iter().map(|d| d.id).collect();
        assert!(certify_suite(&ids, &[], &ParamGrid::default(), &CertifyOptions::default())
            .unwrap()
            .is_empty());
        let trials = alloc::vec![(TrialDescriptor::default(), gaussian3())];
        let out = certify_suite(&ids, &trials, &ParamGrid::default(), &CertifyOptions::default()).unwrap();
        assert_eq!(out.len(), 23);
    }
}
