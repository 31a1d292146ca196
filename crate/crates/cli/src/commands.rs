use std::collections::BTreeMap;
use std::sync::Arc;

use loglab_core::extremal::{
    default_families, derived_seed, optimize, random_trials, FamilyKind, SearchDirection, SearchOptions, SearchResult,
    TrialFamily,
};
use loglab_core::field::{RadialProfile, ScalarField};
use loglab_core::inequalities::{
    certify_suite, certify_with, lookup, registry, CertificateRecord, CertifyOptions, ConstantKind, Kind, Params, Skip,
    SuiteEntry, TrialDescriptor,
};
use loglab_core::mellin::{check_dilation_shift, check_generator, check_semigroup, mellin_forward, SpectralDeviation};
use loglab_core::semigroup::{evolve as run_evolve, Extension, Method, SemigroupQuery};
use loglab_core::sphere::make_spherical_quadrature;
use loglab_core::{Complex64, Error};
use serde::Serialize;

use crate::config::{Command, ProfileSpec, RunConfig};
use crate::report::{self, GridProvenance, Header};
use crate::{CliError, Outcome};

fn header(cfg: &RunConfig, command: &'static str) -> Header {
    Header {
        version: report::VERSION,
        command,
        config_hash: cfg.hash(),
        seed: cfg.seed,
    }
}

fn certify_options(cfg: &RunConfig) -> CertifyOptions {
    CertifyOptions {
        scheme: cfg.scheme,
        tolerances: cfg.tolerances,
        method: cfg.method,
        ..Default::default()
    }
}

fn families_for(kinds: &[FamilyKind], n: usize, refinement: usize) -> Result<Vec<TrialFamily>, CliError> {
    kinds
        .iter()
        .map(|k| Ok(TrialFamily::new(*k, n)?.refined(refinement)))
        .collect()
}

/// Mixtures for the non-compact entries, a bump that fits every configured
/// support for the compact ones, and an angular perturbation where the sphere rule
/// carries one (n = 2, 3).
fn verify_families(cfg: &RunConfig, n: usize) -> Vec<FamilyKind> {
    let power = n as f64 / 2.0;
    let lambda = cfg
        .params
        .radius
        .iter()
        .map(|r| r.ln())
        .chain(cfg.params.lambda.iter().copied())
        .fold(40.0, f64::min);
    let mut kinds = vec![FamilyKind::Mixture { components: 2, power }];
    if lambda > 0.0 {
        kinds.push(FamilyKind::AnnulusBump { lambda, power });
    }
    if (2..=3).contains(&n) {
        kinds.push(FamilyKind::PerturbedRadial { power });
    }
    kinds
}

#[derive(Serialize)]
struct TrialInfo {
    dimension: usize,
    trial: TrialDescriptor,
    grid: GridProvenance,
}

#[derive(Serialize)]
struct Coverage {
    id: &'static str,
    kind: Kind,
    constant: ConstantKind,
    records: usize,
    skipped: usize,
    /// Dimensions left out because they are below the entry's minimum.
    not_applicable: Vec<usize>,
    verdicts: BTreeMap<String, usize>,
    min_ratio: Option<f64>,
    max_ratio: Option<f64>,
}

#[derive(Serialize)]
struct VerifyReport {
    #[serde(flatten)]
    header: Header,
    status: &'static str,
    failures: usize,
    records: usize,
    coverage: Vec<Coverage>,
    trials: Vec<TrialInfo>,
    skipped: Vec<Skip>,
    files: Vec<String>,
}

fn verdict_name<T: Serialize>(v: T) -> String {
    serde_json::to_value(v)
        .ok()
        .and_then(|v| v.as_str().map(str::to_string))
        .unwrap_or_default()
}

pub fn verify(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let ids = cfg.selected_ids(Command::Verify);
    let options = certify_options(cfg);
    let mut records: Vec<CertificateRecord> = Vec::new();
    let mut skipped: Vec<Skip> = Vec::new();
    let mut trials_info = Vec::new();
    let mut not_applicable: BTreeMap<String, Vec<usize>> = BTreeMap::new();

    for (k, &n) in cfg.dimensions.iter().enumerate() {
        let kinds = if cfg.families.is_empty() {
            verify_families(cfg, n)
        } else {
            cfg.families.clone()
        };
        let families = families_for(&kinds, n, cfg.refinement)?;
        let trials = random_trials(&families, cfg.trials, derived_seed(cfg.seed, k))?;
        for (d, f) in &trials {
            trials_info.push(TrialInfo {
                dimension: n,
                trial: d.clone(),
                grid: GridProvenance::new(f.grid(), Some(n), Some(f.sphere().order())),
            });
        }
        let mut applicable = Vec::new();
        for id in &ids {
            if n >= lookup(id)?.min_dimension {
                applicable.push(id.as_str());
            } else {
                not_applicable.entry(id.clone()).or_default().push(n);
            }
        }
        for entry in certify_suite(&applicable, &trials, &cfg.params, &options)? {
            match entry {
                SuiteEntry::Record(r) => records.push(r),
                SuiteEntry::Skipped(s) => skipped.push(s),
            }
        }
    }

    let coverage: Vec<Coverage> = registry()
        .iter()
        .map(|def| {
            let mine: Vec<&CertificateRecord> = records.iter().filter(|r| r.id == def.id).collect();
            let mut verdicts = BTreeMap::new();
            for r in &mine {
                *verdicts.entry(verdict_name(r.verdict)).or_insert(0) += 1;
            }
            let finite = mine.iter().map(|r| r.ratio).filter(|x| x.is_finite());
            Coverage {
                id: def.id,
                kind: def.kind,
                constant: def.constant,
                records: mine.len(),
                skipped: skipped.iter().filter(|s| s.id == def.id).count(),
                not_applicable: not_applicable.get(def.id).cloned().unwrap_or_default(),
                verdicts,
                min_ratio: finite.clone().reduce(f64::min),
                max_ratio: finite.reduce(f64::max),
            }
        })
        .collect();

    let failures: Vec<&CertificateRecord> = records.iter().filter(|r| r.verdict.is_failure()).collect();
    let outcome = if failures.is_empty() {
        Outcome::Ok
    } else {
        Outcome::Violation
    };

    report::create_dir(&cfg.out)?;
    report::write_json(&cfg.out, "certificates.json", &records)?;
    report::write_text(&cfg.out, "certificates.csv", &report::records_csv(&records))?;
    let summary = VerifyReport {
        header: header(cfg, "verify"),
        status: if outcome == Outcome::Ok { "ok" } else { "violation" },
        failures: failures.len(),
        records: records.len(),
        coverage,
        trials: trials_info,
        skipped,
        files: vec!["certificates.json".into(), "certificates.csv".into(), "report.json".into()],
    };
    report::write_json(&cfg.out, "report.json", &summary)?;

    println!(
        "verify: {} records, {} skipped, {} failures, coverage over {} entries",
        summary.records,
        summary.skipped.len(),
        summary.failures,
        summary.coverage.len()
    );
    for r in failures.iter().take(20) {
        println!(
            "  FAIL {} ({}) trial {}#{}: lhs {:e} rhs {:e} margin {:e}",
            r.id,
            verdict_name(r.verdict),
            r.trial.family,
            r.trial.index,
            r.lhs,
            r.rhs,
            r.margin
        );
    }
    Ok(outcome)
}

#[derive(Serialize)]
struct CrossCheck {
    t: f64,
    /// Sup distance of each method to the reference, None if the method
    /// refused the query.
    direct: Option<f64>,
    fast_convolution: Option<f64>,
    mellin_multiplier: Option<f64>,
    /// "exact" when a closed form is available, else the selected method.
    reference: &'static str,
    /// Largest pairwise sup distance among the methods and the closed form.
    discrepancy: f64,
}

#[derive(Serialize)]
struct EvolveReport {
    #[serde(flatten)]
    header: Header,
    grid: GridProvenance,
    profile: ProfileSpec,
    method: Method,
    extension: Extension,
    times: Vec<f64>,
    files: Vec<String>,
    crosscheck: Vec<CrossCheck>,
}

fn opt_csv(x: Option<f64>) -> String {
    x.map_or_else(String::new, report::num)
}

pub fn evolve(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let spec = cfg.evolve.profile;
    let extension = cfg.evolve.extension;
    let profile = RadialProfile::from_real_fn(cfg.grid, |s| spec.value(s))?;
    // a constant is only reproduced exactly when the grid is continued by its edge values
    let closed_form = !(matches!(spec, ProfileSpec::Constant { .. }) && extension == Extension::Zero);

    report::create_dir(&cfg.out)?;
    let mut files = vec!["initial.csv".to_string()];
    report::write_text(&cfg.out, "initial.csv", &report::profile_csv(&profile))?;
    let mut rows = Vec::new();
    let mut table = String::from("t,direct,fast_convolution,mellin_multiplier,reference,discrepancy\n");
    for (i, &t) in cfg.evolve.times.iter().enumerate() {
        let q = SemigroupQuery::new(t, cfg.method)?.with_extension(extension);
        let selected = run_evolve(&profile, &q)?;
        let name = format!("evolve_{i:02}_t{t}.csv");
        report::write_text(&cfg.out, &name, &report::profile_csv(&selected))?;
        files.push(name);

        let exact = if closed_form {
            Some(RadialProfile::from_real_fn(cfg.grid, |s| spec.evolved(s, t).unwrap_or(f64::NAN))?)
        } else {
            None
        };
        let reference = exact.as_ref().unwrap_or(&selected);
        let runs: Vec<Option<RadialProfile>> = Method::ALL
            .iter()
            .map(|&m| run_evolve(&profile, &SemigroupQuery::new(t, m).ok()?.with_extension(extension)).ok())
            .collect();
        let dist: Vec<Option<f64>> = runs
            .iter()
            .map(|r| r.as_ref().map(|p| p.max_distance(reference)))
            .collect();
        let mut pool: Vec<&RadialProfile> = runs.iter().flatten().collect();
        pool.extend(exact.iter());
        let mut discrepancy: f64 = 0.0;
        for a in 0..pool.len() {
            for b in a + 1..pool.len() {
                discrepancy = discrepancy.max(pool[a].max_distance(pool[b]));
            }
        }
        let row = CrossCheck {
            t,
            direct: dist[0],
            fast_convolution: dist[1],
            mellin_multiplier: dist[2],
            reference: if exact.is_some() { "exact" } else { cfg.method.name() },
            discrepancy,
        };
        table.push_str(&format!(
            "{},{},{},{},{},{}\n",
            report::num(t),
            opt_csv(row.direct),
            opt_csv(row.fast_convolution),
            opt_csv(row.mellin_multiplier),
            row.reference,
            report::num(row.discrepancy)
        ));
        println!("evolve: t = {t}, discrepancy {:e}", row.discrepancy);
        rows.push(row);
    }
    report::write_text(&cfg.out, "crosscheck.csv", &table)?;
    files.push("crosscheck.csv".into());
    files.push("evolve.json".into());
    let rep = EvolveReport {
        header: header(cfg, "evolve"),
        grid: GridProvenance::new(&cfg.grid, None, None),
        profile: spec,
        method: cfg.method,
        extension,
        times: cfg.evolve.times.clone(),
        files,
        crosscheck: rows,
    };
    report::write_json(&cfg.out, "evolve.json", &rep)?;
    Ok(Outcome::Ok)
}

#[derive(Serialize)]
struct Deviation {
    max_deviation: f64,
    relative: f64,
    scale: f64,
    band: f64,
}

impl From<SpectralDeviation> for Deviation {
    fn from(d: SpectralDeviation) -> Self {
        Self {
            max_deviation: d.max_deviation,
            relative: d.relative(),
            scale: d.scale,
            band: d.band,
        }
    }
}

#[derive(Serialize)]
struct Deviations {
    /// M(U(t)f) against e^{itτ} Mf.
    dilation_shift: Deviation,
    /// M(Af) against τ Mf.
    generator: Deviation,
    /// M(P_t f) against e^{-tτ²} Mf.
    semigroup: Deviation,
}

#[derive(Serialize)]
struct SpectrumReport {
    #[serde(flatten)]
    header: Header,
    grid: GridProvenance,
    profile: ProfileSpec,
    shift: f64,
    time: f64,
    deviations: Deviations,
    files: Vec<String>,
}

pub fn spectrum(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let sc = &cfg.spectrum;
    let n = sc.dimension;
    let sphere = Arc::new(make_spherical_quadrature(n, cfg.sphere_order)?);
    let half_n = n as f64 / 2.0;
    let spec = sc.profile;
    let f = ScalarField::from_log_radial_fn(cfg.grid, sphere, |s| {
        let v = spec.value(s);
        Complex64::new(if v == 0.0 { 0.0 } else { v * (-half_n * s).exp() }, 0.0)
    })?;
    let data = mellin_forward(&f)?;
    let q = SemigroupQuery::new(sc.time, cfg.method)?;
    let deviations = Deviations {
        dilation_shift: check_dilation_shift(&f, sc.shift)?.into(),
        generator: check_generator(&f, cfg.scheme)?.into(),
        semigroup: check_semigroup(&f, &q)?.into(),
    };
    report::create_dir(&cfg.out)?;
    report::write_text(&cfg.out, "spectrum.csv", &report::spectrum_csv(&data))?;
    println!(
        "spectrum: deviations dilation {:e}, generator {:e}, semigroup {:e}",
        deviations.dilation_shift.max_deviation, deviations.generator.max_deviation, deviations.semigroup.max_deviation
    );
    let rep = SpectrumReport {
        header: header(cfg, "spectrum"),
        grid: GridProvenance::new(&cfg.grid, Some(n), Some(cfg.sphere_order)),
        profile: spec,
        shift: sc.shift,
        time: sc.time,
        deviations,
        files: vec!["spectrum.csv".into(), "deviations.json".into()],
    };
    report::write_json(&cfg.out, "deviations.json", &rep)?;
    Ok(Outcome::Ok)
}

#[derive(Serialize)]
struct Best {
    id: String,
    params: Params,
    direction: SearchDirection,
    family: String,
    best_ratio: f64,
    /// For unspecified constants the best ratio is an empirical lower bound.
    constant: ConstantKind,
}

#[derive(Serialize)]
struct SearchReport {
    #[serde(flatten)]
    header: Header,
    status: &'static str,
    best: Vec<Best>,
    results: Vec<SearchResult>,
}

#[derive(Serialize)]
struct Counterexample {
    #[serde(flatten)]
    header: Header,
    status: &'static str,
    id: String,
    family_kind: FamilyKind,
    dimension: usize,
    params: Params,
    trial: TrialDescriptor,
    ratio: f64,
    margin: f64,
    record: Option<CertificateRecord>,
    /// Searches completed before the counterexample.
    completed: Vec<SearchResult>,
}

pub fn search(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let sc = &cfg.search;
    let n = sc.dimension;
    let options = certify_options(cfg);
    let mut results: Vec<SearchResult> = Vec::new();
    let mut best = Vec::new();
    let mut index = 0usize;
    report::create_dir(&cfg.out)?;

    for id in cfg.selected_ids(Command::Search) {
        let def = lookup(&id)?;
        let direction = match sc.direction {
            Some(d) => d,
            None => SearchDirection::for_entry(def.id)?,
        };
        for params in cfg.params.combinations(def) {
            let kinds = if cfg.families.is_empty() {
                default_families(def.id, n, &params)?
            } else {
                cfg.families.clone()
            };
            let first = results.len();
            for family in families_for(&kinds, n, cfg.refinement)? {
                let opts = SearchOptions {
                    budget: sc.budget,
                    seed: derived_seed(cfg.seed, index),
                    restarts: sc.restarts,
                    tolerance: sc.tolerance,
                    certify: options,
                };
                index += 1;
                match optimize(def.id, &family, &params, direction, &opts) {
                    Ok(r) => results.push(r),
                    Err(Error::Counterexample { id, params: x, ratio, margin }) => {
                        let trial = family.descriptor(0, &x);
                        let record = family
                            .generate(&x)
                            .and_then(|f| certify_with(def.id, &f, &params, &options, trial.clone()))
                            .ok();
                        let rep = Counterexample {
                            header: header(cfg, "search"),
                            status: "violation",
                            id,
                            family_kind: family.kind(),
                            dimension: n,
                            params: params.clone(),
                            trial,
                            ratio,
                            margin,
                            record,
                            completed: results,
                        };
                        report::write_json(&cfg.out, "counterexample.json", &rep)?;
                        println!(
                            "search: counterexample for {} in {} at {:?}: ratio {ratio} margin {margin:e}",
                            def.id,
                            family.id(),
                            rep.trial.parameters
                        );
                        return Ok(Outcome::Violation);
                    }
                    Err(e) => return Err(e.into()),
                }
            }
            let group = &results[first..];
            let top = group.iter().reduce(|a, b| {
                let better = match direction {
                    SearchDirection::Maximize => b.best_ratio > a.best_ratio,
                    SearchDirection::Minimize => b.best_ratio < a.best_ratio,
                };
                if better {
                    b
                } else {
                    a
                }
            });
            if let Some(top) = top {
                println!(
                    "search: {} {:?} best ratio {} ({})",
                    def.id, params, top.best_ratio, top.family
                );
                best.push(Best {
                    id: def.id.to_string(),
                    params: params.clone(),
                    direction,
                    family: top.family.clone(),
                    best_ratio: top.best_ratio,
                    constant: def.constant,
                });
            }
        }
    }
    let rep = SearchReport {
        header: header(cfg, "search"),
        status: "ok",
        best,
        results,
    };
    report::write_json(&cfg.out, "search.json", &rep)?;
    Ok(Outcome::Ok)
}
