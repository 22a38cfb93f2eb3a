// SPDX-License-Identifier: Apache-2.0

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::density::CMatrix;
use crate::error::{Error, Result};
use crate::generator::GeneratorContext;
use crate::observables::{site_density, ObservableSeries};

use super::run::RunResult;
use super::BuildInfo;

/// Final-state digest written as `summary.toml`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub scenario: String,
    /// "fermi-dirac" with blocking, "canonical" without.
    pub equilibrium_model: String,
    pub equilibrated: bool,
    pub final_time: f64,
    pub steps_accepted: usize,
    pub steps_rejected: usize,
    pub rate_scale: f64,
    pub max_trace_drift: f64,
    pub max_hermiticity_residual: f64,
    pub min_occupation_eigenvalue: f64,
    pub max_occupation_eigenvalue: f64,
    pub chemical_potential: f64,
    pub beta: f64,
    pub final_populations: Vec<f64>,
    pub fd_targets: Vec<f64>,
    pub max_fd_residual: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub canonical_targets: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_canonical_relative_residual: Option<f64>,
    pub final_ground_state_probability: f64,
    /// max/min effective return rate while 0.05 ≤ P_g ≤ 0.95.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub effective_rate_ratio: Option<f64>,
    pub final_site_populations: Vec<f64>,
    pub max_site_deviation_from_mean: f64,
    /// Half peak-to-peak over the last tenth of the samples.
    pub late_site_oscillation_amplitude: f64,
    pub late_population_oscillation_amplitude: f64,
    pub long_range_coherence_initial: f64,
    pub long_range_coherence_final: f64,
    pub coherence_min_separation: usize,
}

/// γ at one instant in both bases.
#[derive(Debug, Clone, PartialEq)]
pub struct Snapshot {
    pub label: String,
    pub time: f64,
    pub eigen: CMatrix,
    pub site: CMatrix,
}

impl Snapshot {
    pub fn new(label: &str, time: f64, eigen: CMatrix, ctx: &GeneratorContext) -> Self {
        let site = site_density(&eigen, ctx.eigen());
        Snapshot {
            label: label.into(),
            time,
            eigen,
            site,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BundlePaths {
    pub dir: PathBuf,
    pub manifest: PathBuf,
    pub series: PathBuf,
    pub snapshot_index: PathBuf,
    pub summary: PathBuf,
}

fn write(path: &Path, contents: &str) -> Result<()> {
    fs::write(path, contents).map_err(|e| Error::io(path, e))
}

fn num(x: f64) -> String {
    format!("{x:e}")
}

pub(crate) fn series_csv(series: &ObservableSeries, n: usize) -> String {
    let mut out = String::from("t");
    for i in 1..=n {
        let _ = write!(out, ",n_{i}");
    }
    for i in 1..=n {
        let _ = write!(out, ",site_{i}");
    }
    out.push_str(",P_g,trace,herm_residual\n");
    for s in &series.samples {
        out.push_str(&num(s.time));
        for x in s.populations.iter().chain(&s.site_populations) {
            out.push(',');
            out.push_str(&num(*x));
        }
        let _ = writeln!(
            out,
            ",{},{},{}",
            num(s.ground_state_probability),
            num(s.trace),
            num(s.hermiticity_residual)
        );
    }
    out
}

fn matrix_csv(m: &CMatrix, part: fn(&crate::density::C64) -> f64) -> String {
    let mut out = String::new();
    for i in 0..m.nrows() {
        let row: Vec<String> = (0..m.ncols()).map(|j| num(part(&m[(i, j)]))).collect();
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

/// Write manifest, series, snapshots and summary into `dir`.
pub fn write_bundle(result: &RunResult, dir: &Path) -> Result<BundlePaths> {
    let snap_dir = dir.join("snapshots");
    fs::create_dir_all(&snap_dir).map_err(|e| Error::io(&snap_dir, e))?;

    let mut manifest = result.scenario.clone();
    manifest.build = Some(BuildInfo::current());
    manifest.run.out = None;
    let paths = BundlePaths {
        dir: dir.to_path_buf(),
        manifest: dir.join("manifest.toml"),
        series: dir.join("series.csv"),
        snapshot_index: snap_dir.join("index.csv"),
        summary: dir.join("summary.toml"),
    };
    write(&paths.manifest, &manifest.to_toml_string()?)?;
    write(&paths.series, &series_csv(&result.series, result.context.dim()))?;

    let mut index = String::from("index,label,t,basis,real_file,imag_file\n");
    for (k, snap) in result.snapshots.iter().enumerate() {
        for (basis, m) in [("eigen", &snap.eigen), ("site", &snap.site)] {
            let re = format!("{basis}_{k:03}_re.csv");
            let im = format!("{basis}_{k:03}_im.csv");
            write(&snap_dir.join(&re), &matrix_csv(m, |z| z.re))?;
            write(&snap_dir.join(&im), &matrix_csv(m, |z| z.im))?;
            let _ = writeln!(index, "{k},{},{},{basis},{re},{im}", snap.label, num(snap.time));
        }
    }
    write(&paths.snapshot_index, &index)?;
    let summary = toml::to_string(&result.summary).map_err(|e| Error::Config(e.to_string()))?;
    write(&paths.summary, &summary)?;
    Ok(paths)
}
