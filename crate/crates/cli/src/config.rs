use std::path::{Path, PathBuf};

use loglab_core::deriv::DerivativeScheme;
use loglab_core::extremal::{FamilyKind, SearchDirection, TrialFamily};
use loglab_core::grid::LogRadialGrid;
use loglab_core::inequalities::{lookup, registry, ParamGrid, Tolerances};
use loglab_core::semigroup::{Extension, Method, SemigroupQuery};
use loglab_core::sphere::make_spherical_quadrature;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::CliError;

/// A one-variable profile G(s) on the configured grid.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum ProfileSpec {
    /// amplitude · exp(-(s - center)²/2σ²)
    Gaussian {
        #[serde(default = "one")]
        amplitude: f64,
        #[serde(default)]
        center: f64,
        #[serde(default = "one")]
        sigma: f64,
    },
    Constant {
        #[serde(default = "one")]
        value: f64,
    },
    Zero,
}

fn one() -> f64 {
    1.0
}

impl Default for ProfileSpec {
    fn default() -> Self {
        ProfileSpec::Gaussian {
            amplitude: 1.0,
            center: 0.0,
            sigma: 1.0,
        }
    }
}

impl ProfileSpec {
    pub fn value(&self, s: f64) -> f64 {
        match *self {
            ProfileSpec::Gaussian { amplitude, center, sigma } => {
                amplitude * (-(s - center).powi(2) / (2.0 * sigma * sigma)).exp()
            }
            ProfileSpec::Constant { value } => value,
            ProfileSpec::Zero => 0.0,
        }
    }

    /// Closed form of P_t G on the whole line, when there is one.
    pub fn evolved(&self, s: f64, t: f64) -> Option<f64> {
        match *self {
            ProfileSpec::Gaussian { amplitude, center, sigma } => {
                let var = sigma * sigma + 2.0 * t;
                Some(amplitude * sigma / var.sqrt() * (-(s - center).powi(2) / (2.0 * var)).exp())
            }
            ProfileSpec::Constant { value } => Some(value),
            ProfileSpec::Zero => Some(0.0),
        }
    }

    fn validate(&self) -> Result<(), String> {
        let ok = match *self {
            ProfileSpec::Gaussian { amplitude, center, sigma } => {
                amplitude.is_finite() && center.is_finite() && sigma.is_finite() && sigma > 0.0
            }
            ProfileSpec::Constant { value } => value.is_finite(),
            ProfileSpec::Zero => true,
        };
        if ok {
            Ok(())
        } else {
            Err(format!("invalid profile {self:?}"))
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct EvolveConfig {
    pub profile: ProfileSpec,
    pub times: Vec<f64>,
    pub extension: Extension,
}

impl Default for EvolveConfig {
    fn default() -> Self {
        Self {
            profile: ProfileSpec::default(),
            times: vec![0.01, 0.1, 1.0],
            extension: Extension::Edge,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SpectrumConfig {
    /// Φf, so that f(e^s ω) = e^{-ns/2} G(s).
    pub profile: ProfileSpec,
    pub dimension: usize,
    /// Dilation parameter for the shift check.
    pub shift: f64,
    /// Time for the semigroup check.
    pub time: f64,
}

impl Default for SpectrumConfig {
    fn default() -> Self {
        Self {
            profile: ProfileSpec::default(),
            dimension: 3,
            shift: 0.5,
            time: 0.1,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SearchConfig {
    pub dimension: usize,
    pub budget: usize,
    pub restarts: usize,
    pub tolerance: f64,
    /// Defaults to the direction that probes the entry's constant.
    pub direction: Option<SearchDirection>,
}

impl Default for SearchConfig {
    fn default() -> Self {
        Self {
            dimension: 3,
            budget: 500,
            restarts: 3,
            tolerance: 1e-6,
            direction: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub seed: u64,
    /// Grid for evolve and spectrum. Trial families pick their own grids.
    pub grid: LogRadialGrid,
    /// Order of the spherical rule for fields built on `grid`.
    pub sphere_order: usize,
    /// Radial refinement factor applied to every trial family.
    pub refinement: usize,
    pub scheme: DerivativeScheme,
    pub method: Method,
    pub tolerances: Tolerances,
    /// Registry ids; empty means every entry for verify and hardy_dilation
    /// for search.
    pub ids: Vec<String>,
    /// Trial families; empty means the defaults for each entry and dimension.
    pub families: Vec<FamilyKind>,
    /// Random trials per family in verify.
    pub trials: usize,
    pub dimensions: Vec<usize>,
    pub params: ParamGrid,
    pub out: PathBuf,
    pub evolve: EvolveConfig,
    pub spectrum: SpectrumConfig,
    pub search: SearchConfig,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            seed: 0,
            grid: LogRadialGrid::default(),
            sphere_order: 2,
            refinement: 1,
            scheme: DerivativeScheme::default(),
            method: Method::default(),
            tolerances: Tolerances::default(),
            ids: Vec::new(),
            families: Vec::new(),
            trials: 3,
            dimensions: vec![3],
            params: ParamGrid::default(),
            out: PathBuf::from("loglab-out"),
            evolve: EvolveConfig::default(),
            spectrum: SpectrumConfig::default(),
            search: SearchConfig::default(),
        }
    }
}

/// Command line values that take precedence over the file.
#[derive(Clone, Debug, Default)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
    pub ids: Option<Vec<String>>,
    pub method: Option<String>,
    pub times: Option<Vec<f64>>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Command {
    Verify,
    Evolve,
    Spectrum,
    Search,
}

impl RunConfig {
    pub fn load(path: Option<&Path>) -> Result<Self, CliError> {
        match path {
            None => Ok(Self::default()),
            Some(p) => {
                let text = std::fs::read_to_string(p)
                    .map_err(|e| CliError::Config(format!("cannot read {}: {e}", p.display())))?;
                serde_json::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", p.display())))
            }
        }
    }

    pub fn apply(&mut self, o: Overrides) -> Result<(), CliError> {
        if let Some(seed) = o.seed {
            self.seed = seed;
        }
        if let Some(out) = o.out {
            self.out = out;
        }
        if let Some(ids) = o.ids {
            self.ids = ids;
        }
        if let Some(m) = o.method {
            self.method = m.parse().map_err(|e| CliError::Config(format!("{e}")))?;
        }
        if let Some(times) = o.times {
            self.evolve.times = times;
        }
        Ok(())
    }

    /// Ids the command runs on.
    pub fn selected_ids(&self, command: Command) -> Vec<String> {
        if !self.ids.is_empty() {
            return self.ids.clone();
        }
        match command {
            Command::Search => vec!["hardy_dilation".to_string()],
            _ => registry().iter().map(|d| d.id.to_string()).collect(),
        }
    }

    /// Checks everything the command will touch before any computation.
    pub fn validate(&self, command: Command) -> Result<(), CliError> {
        let fail = |msg: String| Err(CliError::Config(msg));
        let t = &self.tolerances;
        if !(t.identity.is_finite() && t.identity >= 0.0) {
            return fail(format!("identity tolerance {} must be finite and nonnegative", t.identity));
        }
        // a negative inequality tolerance demands that much slack; below -1
        // nothing could pass
        if !(t.inequality.is_finite() && t.inequality >= -1.0) {
            return fail(format!("inequality tolerance {} must be finite and at least -1", t.inequality));
        }
        for id in &self.ids {
            lookup(id)?;
        }
        match command {
            Command::Verify => {
                if self.trials == 0 {
                    return fail("trials must be positive".into());
                }
                if self.dimensions.is_empty() {
                    return fail("no dimensions selected".into());
                }
                self.check_trials(&self.dimensions)?;
                self.check_params(command, &self.dimensions)?;
            }
            Command::Search => {
                let n = self.search.dimension;
                if self.search.budget == 0 || self.search.restarts == 0 {
                    return fail("search budget and restarts must be positive".into());
                }
                if !(self.search.tolerance.is_finite() && self.search.tolerance > 0.0) {
                    return fail("search tolerance must be positive".into());
                }
                self.check_trials(&[n])?;
                self.check_params(command, &[n])?;
            }
            Command::Evolve => {
                self.evolve.profile.validate().map_err(CliError::Config)?;
                if self.evolve.times.is_empty() {
                    return fail("no times given".into());
                }
                for &t in &self.evolve.times {
                    SemigroupQuery::new(t, self.method)?;
                }
            }
            Command::Spectrum => {
                let s = &self.spectrum;
                s.profile.validate().map_err(CliError::Config)?;
                make_spherical_quadrature(s.dimension, self.sphere_order)?;
                if !s.shift.is_finite() || s.shift.abs() >= self.grid.span() {
                    return fail(format!("shift {} must be finite and below the grid span", s.shift));
                }
                SemigroupQuery::new(s.time, self.method)?;
            }
        }
        Ok(())
    }

    fn check_trials(&self, dims: &[usize]) -> Result<(), CliError> {
        if self.refinement == 0 {
            return Err(CliError::Config("refinement must be positive".into()));
        }
        for &n in dims {
            make_spherical_quadrature(n, self.sphere_order)?;
            for kind in &self.families {
                TrialFamily::new(*kind, n)?;
            }
        }
        Ok(())
    }

    fn check_params(&self, command: Command, dims: &[usize]) -> Result<(), CliError> {
        for id in self.selected_ids(command) {
            let def = lookup(&id)?;
            for &n in dims {
                if command == Command::Verify && n < def.min_dimension {
                    continue;
                }
                for params in self.params.combinations(def) {
                    def.check_domain(n, &params)?;
                }
            }
        }
        Ok(())
    }

    /// SHA-256 of the canonical JSON form, output path excluded so that the
    /// same computation written to two places hashes the same.
    pub fn hash(&self) -> String {
        let mut canonical = self.clone();
        canonical.out = PathBuf::new();
        let bytes = serde_json::to_vec(&canonical).expect("config serializes");
        Sha256::digest(&bytes).iter().map(|b| format!("{b:02x}")).collect()
    }
}
