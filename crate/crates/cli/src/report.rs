//! Report files: pretty JSON documents and plot-ready CSV.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use loglab_core::field::RadialProfile;
use loglab_core::grid::LogRadialGrid;
use loglab_core::inequalities::CertificateRecord;
use loglab_core::mellin::MellinData;
use serde::Serialize;

use crate::CliError;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Grid description carried by every report.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct GridProvenance {
    pub s_min: f64,
    pub s_max: f64,
    pub count: usize,
    /// Ambient dimension, absent for bare profiles.
    pub dimension: Option<usize>,
    /// Order of the spherical rule, absent for bare profiles.
    pub order: Option<usize>,
}

impl GridProvenance {
    pub fn new(grid: &LogRadialGrid, dimension: Option<usize>, order: Option<usize>) -> Self {
        Self {
            s_min: grid.s_min(),
            s_max: grid.s_max(),
            count: grid.count(),
            dimension,
            order,
        }
    }
}

/// Fields common to every JSON report.
#[derive(Clone, Debug, Serialize)]
pub struct Header {
    pub version: &'static str,
    pub command: &'static str,
    pub config_hash: String,
    pub seed: u64,
}

pub fn create_dir(dir: &Path) -> Result<(), CliError> {
    std::fs::create_dir_all(dir).map_err(|source| CliError::Io {
        context: format!("creating {}", dir.display()),
        source,
    })
}

fn write_file(path: &Path, contents: &str) -> Result<PathBuf, CliError> {
    std::fs::write(path, contents).map_err(|source| CliError::Io {
        context: format!("writing {}", path.display()),
        source,
    })?;
    Ok(path.to_path_buf())
}

pub fn write_json<T: Serialize>(dir: &Path, name: &str, value: &T) -> Result<PathBuf, CliError> {
    let mut text = serde_json::to_string_pretty(value).map_err(|e| CliError::Config(format!("serializing {name}: {e}")))?;
    text.push('\n');
    write_file(&dir.join(name), &text)
}

pub fn write_text(dir: &Path, name: &str, text: &str) -> Result<PathBuf, CliError> {
    write_file(&dir.join(name), text)
}

/// Shortest round-trip form, scientific outside [1e-4, 1e15).
pub fn num(x: f64) -> String {
    let a = x.abs();
    if a == 0.0 || !a.is_finite() || (1e-4..1e15).contains(&a) {
        format!("{x}")
    } else {
        format!("{x:e}")
    }
}

/// `s,re,im`
pub fn profile_csv(profile: &RadialProfile) -> String {
    let mut out = String::from("s,re,im\n");
    for (s, z) in profile.grid().points().zip(profile.values()) {
        let _ = writeln!(out, "{},{},{}", num(s), num(z.re), num(z.im));
    }
    out
}

/// `tau,omega_index,re,im`
pub fn spectrum_csv(data: &MellinData) -> String {
    let mut out = String::from("tau,omega_index,re,im\n");
    for j in 0..data.slice_count() {
        for (tau, z) in data.frequencies().iter().zip(data.slice(j)) {
            let _ = writeln!(out, "{},{j},{},{}", num(*tau), num(z.re), num(z.im));
        }
    }
    out
}

/// One row per record; list-valued columns are joined with `;`.
pub fn records_csv(records: &[CertificateRecord]) -> String {
    let mut out = String::from("id,params,trial_family,trial_index,trial_parameters,lhs,rhs,ratio,margin,verdict,tolerance\n");
    for r in records {
        let params: Vec<String> = r.params.iter().map(|(k, v)| format!("{k}={}", num(*v))).collect();
        let trial: Vec<String> = r.trial.parameters.iter().map(|v| num(*v)).collect();
        let verdict = serde_json::to_value(r.verdict)
            .ok()
            .and_then(|v| v.as_str().map(str::to_string))
            .unwrap_or_default();
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{},{}",
            r.id,
            params.join(";"),
            r.trial.family,
            r.trial.index,
            trial.join(";"),
            num(r.lhs),
            num(r.rhs),
            num(r.ratio),
            num(r.margin),
            verdict,
            num(r.tolerance)
        );
    }
    out
}
