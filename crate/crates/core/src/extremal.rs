//! Parametrized trial families and derivative-free search over them, used to
//! probe sharpness of explicit constants and to bound unspecified ones from
//! below.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::sync::Arc;
use alloc::vec::Vec;
use core::f64::consts::PI;
use num_complex::Complex64;
#[allow(unused_imports)] // float methods are inherent once std is linked
use num_traits::Float;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::ScalarField;
use crate::grid::LogRadialGrid;
use crate::inequalities::{
    certify_with, lookup, CertificateRecord, CertifyOptions, ConstantKind, Direction, Params, TrialDescriptor, Verdict,
};
use crate::optimize::NelderMead;
use crate::sphere::{make_spherical_quadrature, SphericalQuadrature};

/// Shape of a trial family. `power` is the exponent a in the factor r^{-a};
/// a = n/p makes |f|^p dx a Gaussian density in s.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum FamilyKind {
    /// f(e^s) = e^{-as} exp(-(s-μ)²/2σ²), parameters [σ, μ].
    LogGaussian { power: f64 },
    /// Sum of complex log-Gaussian bumps, parameters [amp, phase, σ, μ] per
    /// component.
    Mixture { components: usize, power: f64 },
    /// e^{-as} exp(-1/(1-((s-c)/(wΛ))²)) supported in |s| ≤ Λ, parameters
    /// [w, u] with c = u(1-w)Λ.
    AnnulusBump { lambda: f64, power: f64 },
    /// (1+r²)^{-(n-2)/2}, no parameters.
    SobolevBubble,
    /// Log-Gaussian times (1 + ε ω_n), parameters [σ, μ, ε].
    PerturbedRadial { power: f64 },
}

impl FamilyKind {
    pub fn id(&self) -> &'static str {
        match self {
            FamilyKind::LogGaussian { .. } => "log-gaussian",
            FamilyKind::Mixture { .. } => "mixture",
            FamilyKind::AnnulusBump { .. } => "annulus-bump",
            FamilyKind::SobolevBubble => "sobolev-bubble",
            FamilyKind::PerturbedRadial { .. } => "perturbed-radial",
        }
    }
}

/// Log-Gaussians are sampled on μ ± 8σ, where the Gaussian factor falls to
/// e^{-32}.
const LOG_GAUSSIAN_WIDTHS: f64 = 8.0;

/// Largest σ for log-Gaussians: samples stay below about e^{320}, so their
/// squares remain finite.
pub fn sigma_cap(power: f64) -> f64 {
    if power > 0.0 {
        (40.0 / power).min(50.0)
    } else {
        50.0
    }
}

#[derive(Clone, Debug)]
pub struct TrialFamily {
    kind: FamilyKind,
    dimension: usize,
    sphere: Arc<SphericalQuadrature>,
    refinement: usize,
}

impl TrialFamily {
    pub fn new(kind: FamilyKind, dimension: usize) -> Result<Self> {
        let bad = |name, value, reason| Err(Error::ParameterDomain { name, value, reason });
        match kind {
            FamilyKind::Mixture { components, .. } if components == 0 => {
                return bad("components", 0.0, "at least one component")
            }
            FamilyKind::AnnulusBump { lambda, .. } if !(lambda > 0.0 && lambda <= 40.0) => {
                return bad("lambda", lambda, "Λ must lie in (0, 40]")
            }
            FamilyKind::SobolevBubble if dimension < 3 => return bad("n", dimension as f64, "bubble needs n ≥ 3"),
            // spheres of dimension ≥ 4 only carry radial data
            FamilyKind::PerturbedRadial { .. } if !(2..=3).contains(&dimension) => {
                return bad("n", dimension as f64, "angular perturbation needs n = 2 or 3")
            }
            _ => {}
        }
        let order = match (kind, dimension) {
            (FamilyKind::PerturbedRadial { .. }, _) => 8,
            (_, 2) => 4,
            _ => 2,
        };
        Ok(Self {
            kind,
            dimension,
            sphere: Arc::new(make_spherical_quadrature(dimension, order)?),
            refinement: 1,
        })
    }

    /// Same family sampled with `factor` times as many radial points.
    pub fn refined(mut self, factor: usize) -> Self {
        self.refinement = factor.max(1);
        self
    }

    pub fn kind(&self) -> FamilyKind {
        self.kind
    }

    pub fn id(&self) -> &'static str {
        self.kind.id()
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn description(&self) -> String {
        match self.kind {
            FamilyKind::LogGaussian { power } => format!("r^-{power} times a Gaussian in log r"),
            FamilyKind::Mixture { components, power } => {
                format!("r^-{power} times {components} complex Gaussians in log r")
            }
            FamilyKind::AnnulusBump { lambda, power } => {
                format!("r^-{power} times a smooth bump supported in |log r| <= {lambda}")
            }
            FamilyKind::SobolevBubble => "(1+r^2)^(-(n-2)/2)".to_string(),
            FamilyKind::PerturbedRadial { power } => {
                format!("r^-{power} log-Gaussian times (1 + eps cos theta)")
            }
        }
    }

    /// Lower and upper corners of the parameter box.
    pub fn bounds(&self) -> (Vec<f64>, Vec<f64>) {
        match self.kind {
            FamilyKind::LogGaussian { power } => (alloc::vec![0.5, -2.0], alloc::vec![sigma_cap(power), 2.0]),
            FamilyKind::Mixture { components, .. } => {
                let mut lo = Vec::with_capacity(4 * components);
                let mut hi = Vec::with_capacity(4 * components);
                for _ in 0..components {
                    lo.extend_from_slice(&[0.3, 0.0, 0.3, -2.5]);
                    hi.extend_from_slice(&[1.0, 2.0 * PI, 0.8, 2.5]);
                }
                (lo, hi)
            }
            FamilyKind::AnnulusBump { .. } => (alloc::vec![0.25, -1.0], alloc::vec![1.0, 1.0]),
            FamilyKind::SobolevBubble => (Vec::new(), Vec::new()),
            FamilyKind::PerturbedRadial { .. } => (alloc::vec![0.5, -2.0, 0.0], alloc::vec![3.0, 2.0, 0.9]),
        }
    }

    pub fn parameter_count(&self) -> usize {
        self.bounds().0.len()
    }

    /// Maps a point of the unit box to family parameters.
    pub fn from_unit(&self, u: &[f64]) -> Vec<f64> {
        let (lo, hi) = self.bounds();
        lo.iter()
            .zip(&hi)
            .zip(u)
            .map(|((a, b), t)| a + (b - a) * t.clamp(0.0, 1.0))
            .collect()
    }

    /// Inverse of `from_unit`, clamped to the box.
    pub fn to_unit(&self, x: &[f64]) -> Vec<f64> {
        let (lo, hi) = self.bounds();
        lo.iter()
            .zip(&hi)
            .zip(x)
            .map(|((a, b), v)| if b > a { ((v - a) / (b - a)).clamp(0.0, 1.0) } else { 0.0 })
            .collect()
    }

    /// Uniform draw from the parameter box.
    pub fn sample<R: Rng>(&self, rng: &mut R) -> Vec<f64> {
        let u: Vec<f64> = (0..self.parameter_count()).map(|_| rng.gen::<f64>()).collect();
        self.from_unit(&u)
    }

    fn check_params(&self, params: &[f64]) -> Result<()> {
        let (lo, hi) = self.bounds();
        if params.len() != lo.len() {
            return Err(Error::ParameterDomain {
                name: "trial",
                value: params.len() as f64,
                reason: "wrong number of family parameters",
            });
        }
        for ((v, a), b) in params.iter().zip(&lo).zip(&hi) {
            if !(v.is_finite() && *v >= *a - 1e-12 && *v <= *b + 1e-12) {
                return Err(Error::ParameterDomain {
                    name: "trial",
                    value: *v,
                    reason: "family parameter outside its box",
                });
            }
        }
        Ok(())
    }

    fn count(&self, base: usize) -> usize {
        (base - 1) * self.refinement + 1
    }

    /// μ ± max(12, 8σ), with a·h ≤ 0.04 so that the eighth-order stencil
    /// error on e^{-as} stays below 1e-11.
    fn log_gaussian_grid(&self, power: f64, sigma: f64, mu: f64) -> Result<LogRadialGrid> {
        let half = (LOG_GAUSSIAN_WIDTHS * sigma).max(12.0);
        let base = ((50.0 * power * half).ceil() as usize + 1).max(2048);
        LogRadialGrid::new(mu - half, mu + half, self.count(base))
    }

    /// Samples the family member with the given parameters.
    pub fn generate(&self, params: &[f64]) -> Result<ScalarField> {
        self.check_params(params)?;
        let sphere = self.sphere.clone();
        let n = self.dimension as f64;
        let zero = Complex64::new(0.0, 0.0);
        match self.kind {
            FamilyKind::LogGaussian { power } => {
                let (sigma, mu) = (params[0], params[1]);
                let grid = self.log_gaussian_grid(power, sigma, mu)?;
                ScalarField::from_log_radial_fn(grid, sphere, |s| {
                    Complex64::new((-power * s - (s - mu).powi(2) / (2.0 * sigma * sigma)).exp(), 0.0)
                })
            }
            FamilyKind::Mixture { power, .. } => {
                let grid = LogRadialGrid::new(-12.0, 12.0, self.count(2048))?;
                ScalarField::from_log_radial_fn(grid, sphere, |s| {
                    let sum: Complex64 = params
                        .chunks(4)
                        .map(|c| Complex64::from_polar(c[0], c[1]) * (-(s - c[3]).powi(2) / (2.0 * c[2] * c[2])).exp())
                        .sum();
                    sum * (-power * s).exp()
                })
            }
            FamilyKind::AnnulusBump { lambda, power } => {
                let (w, u) = (params[0], params[1]);
                let width = w * lambda;
                let centre = u * (1.0 - w) * lambda;
                let grid = LogRadialGrid::new(-1.25 * lambda, 1.25 * lambda, self.count(2048))?;
                ScalarField::from_log_radial_fn(grid, sphere, |s| {
                    let x = (s - centre) / width;
                    if x.abs() >= 1.0 {
                        zero
                    } else {
                        Complex64::new((-1.0 / (1.0 - x * x) - power * s).exp(), 0.0)
                    }
                })
            }
            FamilyKind::SobolevBubble => {
                let grid = LogRadialGrid::new(-40.0, 40.0, self.count(4096))?;
                let a = (n - 2.0) / 2.0;
                // (1+r²)^{-a} = e^{-2as}(1+e^{-2s})^{-a} for large s
                ScalarField::from_log_radial_fn(grid, sphere, |s| {
                    let v = if s > 0.0 {
                        (-2.0 * a * s - a * (-2.0 * s).exp().ln_1p()).exp()
                    } else {
                        (-a * (2.0 * s).exp().ln_1p()).exp()
                    };
                    Complex64::new(v, 0.0)
                })
            }
            FamilyKind::PerturbedRadial { power } => {
                let (sigma, mu, eps) = (params[0], params[1], params[2]);
                let grid = self.log_gaussian_grid(power, sigma, mu)?;
                let last = self.dimension - 1;
                ScalarField::from_log_fn(grid, sphere, |s, w| {
                    let radial = (-power * s - (s - mu).powi(2) / (2.0 * sigma * sigma)).exp();
                    Complex64::new(radial * (1.0 + eps * w[last]), 0.0)
                })
            }
        }
    }

    pub fn descriptor(&self, index: usize, params: &[f64]) -> TrialDescriptor {
        TrialDescriptor {
            family: self.id().to_string(),
            index,
            parameters: params.to_vec(),
        }
    }
}

/// Families suited to an entry: the power is chosen so that the norms of the
/// entry see a centred density in s.
pub fn default_families(id: &str, n: usize, params: &Params) -> Result<Vec<FamilyKind>> {
    let def = lookup(id)?;
    let nf = n as f64;
    let p = params.get("p").copied().unwrap_or(2.0);
    let power = match def.id {
        "hardy_classical" => (nf - p) / p,
        "hardy_dilation" | "hardy_chain" => nf / p,
        "hardy_sobolev" | "hardy_sobolev_eps" | "stubbe_pre" | "stubbe" | "annulus_grad" => (nf - 2.0) / 2.0,
        _ => nf / 2.0,
    };
    let mut out = Vec::new();
    match def.id {
        "annulus_L" | "annulus_grad" | "sobolev_compact" => {
            let lambda = if def.id == "sobolev_compact" {
                params.get("lambda").copied().ok_or(Error::MissingParameter("lambda"))?
            } else {
                params.get("R").copied().ok_or(Error::MissingParameter("R"))?.ln()
            };
            out.push(FamilyKind::AnnulusBump { lambda, power });
        }
        _ => {
            out.push(FamilyKind::LogGaussian { power });
            out.push(FamilyKind::Mixture { components: 2, power });
        }
    }
    if matches!(def.id, "stubbe" | "stubbe_pre") {
        out.push(FamilyKind::SobolevBubble);
    }
    if n == 3 && matches!(def.id, "stubbe" | "stubbe_pre" | "hardy_sobolev") {
        out.push(FamilyKind::PerturbedRadial { power });
    }
    Ok(out)
}

/// lhs/rhs of the entry on `f`, with the explicit constant (if any) inside rhs,
/// so that a sharp explicit constant means ratio → 1.
pub fn ratio(id: &str, f: &ScalarField, params: &Params) -> Result<f64> {
    Ok(crate::inequalities::certify(id, f, params)?.ratio)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SearchDirection {
    Maximize,
    Minimize,
}

impl SearchDirection {
    /// Direction that probes the entry's constant: toward violation for
    /// explicit constants, upward for unspecified ones.
    pub fn for_entry(id: &str) -> Result<Self> {
        let def = lookup(id)?;
        Ok(match def.direction {
            Direction::LowerBound => SearchDirection::Minimize,
            _ => SearchDirection::Maximize,
        })
    }

    fn better(self, a: f64, b: f64) -> bool {
        match self {
            SearchDirection::Maximize => a > b,
            SearchDirection::Minimize => a < b,
        }
    }
}

/// Smallest budget accepted for families with parameters.
pub const MIN_BUDGET: usize = 50;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SearchOptions {
    /// Total number of ratio evaluations over all restarts.
    pub budget: usize,
    pub seed: u64,
    pub restarts: usize,
    /// Relative convergence threshold on the ratio.
    pub tolerance: f64,
    pub certify: CertifyOptions,
}

impl Default for SearchOptions {
    fn default() -> Self {
        Self {
            budget: 500,
            seed: 0,
            restarts: 3,
            tolerance: 1e-6,
            certify: CertifyOptions::default(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SearchResult {
    pub id: String,
    pub family: String,
    pub family_kind: FamilyKind,
    pub dimension: usize,
    pub params: Params,
    pub direction: SearchDirection,
    pub best_parameters: Vec<f64>,
    pub best_ratio: f64,
    pub evaluations: usize,
    pub converged: bool,
    /// Best ratio so far after each successful evaluation.
    pub history: Vec<f64>,
    pub seed: u64,
    /// Re-evaluation of the best point.
    pub best_record: CertificateRecord,
}

/// Searches the family for the extreme ratio of entry `id`. Explicit-constant
/// violations abort with `Error::Counterexample`.
pub fn optimize(
    id: &str,
    family: &TrialFamily,
    params: &Params,
    direction: SearchDirection,
    options: &SearchOptions,
) -> Result<SearchResult> {
    let def = lookup(id)?;
    let dim = family.parameter_count();
    if dim > 0 && options.budget < MIN_BUDGET {
        return Err(Error::BudgetTooSmall {
            budget: options.budget,
            minimum: MIN_BUDGET,
        });
    }
    if options.budget == 0 {
        return Err(Error::BudgetTooSmall { budget: 0, minimum: 1 });
    }
    def.check_domain(family.dimension(), params)?;

    let sign = match direction {
        SearchDirection::Maximize => -1.0,
        SearchDirection::Minimize => 1.0,
    };
    let mut rng = ChaCha8Rng::seed_from_u64(options.seed);
    let mut history: Vec<f64> = Vec::new();
    let mut best: Option<(Vec<f64>, f64)> = None;
    let mut last_error: Option<Error> = None;
    let mut evaluations = 0usize;
    let mut converged = false;

    let mut objective = |u: &[f64]| -> Result<f64> {
        let x = family.from_unit(u);
        evaluations += 1;
        let outcome = family
            .generate(&x)
            .and_then(|f| certify_with(def.id, &f, params, &options.certify, family.descriptor(0, &x)));
        match outcome {
            Ok(record) => {
                if record.verdict == Verdict::Violated {
                    return Err(Error::Counterexample {
                        id: def.id.to_string(),
                        params: x,
                        ratio: record.ratio,
                        margin: record.margin,
                    });
                }
                let r = record.ratio;
                if r.is_nan() {
                    return Ok(f64::INFINITY);
                }
                let improved = best.as_ref().map_or(true, |(_, b)| direction.better(r, *b));
                if improved {
                    best = Some((x, r));
                }
                history.push(best.as_ref().unwrap().1);
                Ok(sign * r)
            }
            Err(e) => {
                last_error = Some(e);
                Ok(f64::INFINITY)
            }
        }
    };

    let restarts = if dim == 0 { 1 } else { options.restarts.max(1) };
    let mut remaining = if dim == 0 { 1 } else { options.budget };
    for k in 0..restarts {
        let share = remaining / (restarts - k);
        if share == 0 {
            continue;
        }
        let start: Vec<f64> = (0..dim).map(|_| rng.gen::<f64>()).collect();
        let nm = NelderMead {
            initial_step: 0.25,
            tolerance: options.tolerance,
            max_evaluations: share,
        };
        let m = nm.minimize(&start, &mut objective)?;
        remaining -= m.evaluations.min(remaining);
        converged |= m.converged && m.value.is_finite();
    }
    drop(objective);

    let (best_parameters, _) = match best {
        Some(b) => b,
        None => {
            let reason = last_error.map_or_else(|| "no evaluation succeeded".to_string(), |e| format!("{e}"));
            return Err(Error::AllEvaluationsFailed(reason));
        }
    };
    let f = family.generate(&best_parameters)?;
    let best_record = certify_with(
        def.id,
        &f,
        params,
        &options.certify,
        family.descriptor(0, &best_parameters),
    )?;
    Ok(SearchResult {
        id: def.id.to_string(),
        family: family.id().to_string(),
        family_kind: family.kind(),
        dimension: family.dimension(),
        params: params.clone(),
        direction,
        best_ratio: best_record.ratio,
        best_parameters,
        evaluations,
        converged,
        history,
        seed: options.seed,
        best_record,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConstantEstimate {
    pub id: String,
    /// Largest ratio found, a lower bound for the best constant.
    pub lower_bound: f64,
    /// Index into `searches` of the search that attained it.
    pub best: usize,
    pub searches: Vec<SearchResult>,
    pub seed: u64,
}

/// Seed of the `index`-th search derived from a master seed.
pub fn derived_seed(seed: u64, index: usize) -> u64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index as u64 + 1);
    rng.gen()
}

/// Empirical lower bound for an unspecified constant: the largest ratio over
/// searches in every family.
pub fn estimate_constant(
    id: &str,
    families: &[TrialFamily],
    params: &Params,
    options: &SearchOptions,
) -> Result<ConstantEstimate> {
    let def = lookup(id)?;
    if def.constant != ConstantKind::Unspecified {
        return Err(Error::ExplicitConstant(def.id.to_string()));
    }
    if families.is_empty() {
        return Err(Error::EmptyFamilies);
    }
    let mut searches = Vec::with_capacity(families.len());
    for (i, family) in families.iter().enumerate() {
        let opts = SearchOptions {
            seed: derived_seed(options.seed, i),
            ..*options
        };
        searches.push(optimize(id, family, params, SearchDirection::Maximize, &opts)?);
    }
    let best = (0..searches.len())
        .max_by(|&a, &b| searches[a].best_ratio.total_cmp(&searches[b].best_ratio))
        .unwrap();
    Ok(ConstantEstimate {
        id: def.id.to_string(),
        lower_bound: searches[best].best_ratio,
        best,
        searches,
        seed: options.seed,
    })
}

/// `count` random members of the families, each with its own sub-seed, for
/// use with `certify_suite`.
pub fn random_trials(
    families: &[TrialFamily],
    count: usize,
    seed: u64,
) -> Result<Vec<(TrialDescriptor, ScalarField)>> {
    let mut out = Vec::with_capacity(count * families.len());
    for (k, family) in families.iter().enumerate() {
        let mut rng = ChaCha8Rng::seed_from_u64(derived_seed(seed, k));
        for _ in 0..count {
            let x = family.sample(&mut rng);
            out.push((family.descriptor(out.len(), &x), family.generate(&x)?));
        }
    }
    Ok(out)
}
