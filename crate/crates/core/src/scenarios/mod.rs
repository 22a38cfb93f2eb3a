// SPDX-License-Identifier: Apache-2.0

//! Run configuration: the TOML scenario schema, the built-in presets,
//! initial conditions, output bundles, verification suites and sweeps.

mod output;
mod run;
mod sweep;
mod verify;

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::bath::{BathSpec, DrudeLorentzPeak, DEFAULT_PEAKS};
use crate::density::{CMatrix, DensityMatrix, C64};
use crate::error::{Error, Result};
use crate::generator::{Blocking, Dephasing, GeneratorContext};
use crate::integrator::IntegratorConfig;
use crate::model::{chemical_potential, fd_density, ground_state_occupations, ChainSpec};
use crate::observables::eigen_density;

pub use output::{write_bundle, BundlePaths, Snapshot, Summary};
pub use run::{canonical_populations, run, RunResult};
pub use sweep::{apply, parse_param, sweep, SweepParam, SweepRun};
pub use verify::{verify, SuiteReport, VerifyOptions, VerifyReport};

/// A complete, self-describing run definition.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub name: String,
    #[serde(default)]
    pub description: String,
    pub chain: ChainSpec,
    pub bath: BathConfig,
    pub initial: InitialCondition,
    #[serde(default)]
    pub generator: GeneratorModes,
    #[serde(default)]
    pub integrator: IntegratorConfig,
    #[serde(default)]
    pub run: RunConfig,
    /// Present in saved manifests; ignored on input.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub build: Option<BuildInfo>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BathConfig {
    /// Kelvin.
    pub temperature: f64,
    /// Peaks attached to every site unless overridden.
    #[serde(default = "default_peaks")]
    pub peaks: Vec<DrudeLorentzPeak>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub site_overrides: Vec<SiteOverride>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SiteOverride {
    /// Zero-based site index.
    pub site: usize,
    pub peaks: Vec<DrudeLorentzPeak>,
}

fn default_peaks() -> Vec<DrudeLorentzPeak> {
    DEFAULT_PEAKS.to_vec()
}

impl BathConfig {
    pub fn with_default_peaks(temperature: f64) -> Self {
        BathConfig {
            temperature,
            peaks: default_peaks(),
            site_overrides: Vec::new(),
        }
    }

    pub fn to_spec(&self, n_sites: usize) -> Result<BathSpec> {
        let mut spec = BathSpec::uniform(self.temperature, n_sites, &self.peaks);
        for o in &self.site_overrides {
            let slot = spec
                .peaks_per_site
                .get_mut(o.site)
                .ok_or_else(|| Error::Config(format!("bath override for site {} on a {n_sites}-site chain", o.site)))?;
            *slot = o.peaks.clone();
        }
        spec.validate()?;
        Ok(spec)
    }
}

/// Starting 1-RDM. Level indices are zero-based in ascending energy.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum InitialCondition {
    /// γ = (N_e / N) I.
    InfiniteTemperature,
    /// Fermi-Dirac populations at the given temperature (K).
    Fd { temperature: f64 },
    /// Ground-state filling with `from_level` emptied and `to_level` filled.
    ParticleHole { from_level: usize, to_level: usize },
    /// The leftmost N_e sites filled in the site basis.
    LeftLoaded,
    /// Zero-temperature step filling.
    GroundState,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeneratorModes {
    pub blocking: Blocking,
    pub dephasing: Dephasing,
}

impl Default for GeneratorModes {
    fn default() -> Self {
        GeneratorModes {
            blocking: Blocking::Blocked,
            dephasing: Dephasing::Full,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    /// Final time (au).
    pub t_max: f64,
    /// Sample spacing of the series table (au).
    pub output_interval: f64,
    /// Stop early once the state is stationary.
    pub stop_at_equilibrium: bool,
    /// Stationarity threshold relative to the largest transfer rate.
    pub stationarity_tol: f64,
    /// Abort when an occupation eigenvalue leaves [−bound_tol, 1 + bound_tol]
    /// (blocked runs only).
    pub bound_tol: f64,
    /// Abort when the trace drifts by more than this.
    pub trace_tol: f64,
    /// Extra times (au) at which full γ snapshots are written. The initial
    /// and final states are always written.
    pub snapshot_times: Vec<f64>,
    /// Minimum |x − x′| for the long-range coherence statistic.
    pub coherence_min_separation: usize,
    /// Default output directory; the command line takes precedence.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            t_max: 1e6,
            output_interval: 100.0,
            stop_at_equilibrium: true,
            stationarity_tol: 1e-12,
            bound_tol: 1e-6,
            trace_tol: 1e-6,
            snapshot_times: Vec::new(),
            coherence_min_separation: 8,
            out: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BuildInfo {
    pub package: String,
    pub version: String,
}

impl BuildInfo {
    pub fn current() -> Self {
        BuildInfo {
            package: env!("CARGO_PKG_NAME").to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
        }
    }
}

impl Scenario {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let s: Scenario = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        s.validate()?;
        Ok(s)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_toml_str(&text).map_err(|e| match e {
            Error::Config(msg) => Error::Config(format!("{}: {msg}", path.display())),
            other => other,
        })
    }

    pub fn to_toml_string(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Config(e.to_string()))
    }

    /// Check everything that can be checked without running.
    pub fn validate(&self) -> Result<()> {
        let wrap = |e: Error| match e {
            Error::Config(_) => e,
            other => Error::Config(other.to_string()),
        };
        self.chain.validate().map_err(wrap)?;
        self.bath.to_spec(self.chain.n_sites).map_err(wrap)?;
        self.integrator.validate().map_err(wrap)?;
        let r = &self.run;
        if [r.t_max, r.output_interval, r.stationarity_tol, r.bound_tol, r.trace_tol]
            .iter()
            .any(|x| !(*x > 0.0))
        {
            return Err(Error::Config(
                "run.t_max, output_interval, stationarity_tol, bound_tol and trace_tol must be positive".into(),
            ));
        }
        if r.snapshot_times.iter().any(|t| !(*t > 0.0 && *t <= r.t_max)) {
            return Err(Error::Config("snapshot times must lie in (0, t_max]".into()));
        }
        let (n, ne) = (self.chain.n_sites, self.chain.n_electrons);
        match &self.initial {
            InitialCondition::Fd { temperature } => {
                if !(*temperature > 0.0) {
                    return Err(Error::Config("fd initial temperature must be positive".into()));
                }
                if ne == 0 || ne == n {
                    return Err(Error::Config("fd start needs a partially filled chain".into()));
                }
            }
            InitialCondition::ParticleHole { from_level, to_level }
                if *from_level >= ne || *to_level < ne || *to_level >= n =>
            {
                return Err(Error::Config(format!(
                    "particle-hole needs an occupied from_level < {ne} and a virtual to_level in [{ne}, {n}), got {from_level} -> {to_level}"
                )));
            }
            _ => {}
        }
        Ok(())
    }

    pub fn bath_spec(&self) -> Result<BathSpec> {
        self.bath.to_spec(self.chain.n_sites)
    }

    pub fn context(&self) -> Result<GeneratorContext> {
        GeneratorContext::for_chain(
            &self.chain,
            &self.bath_spec()?,
            self.generator.blocking,
            self.generator.dephasing,
        )
    }
}

/// Build the starting density matrix in the eigenbasis of `ctx`.
pub fn initial_condition(kind: &InitialCondition, chain: &ChainSpec, ctx: &GeneratorContext) -> Result<DensityMatrix> {
    let (n, ne) = (chain.n_sites, chain.n_electrons);
    if ctx.dim() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: ctx.dim(),
        });
    }
    let count = ne as f64;
    match kind {
        InitialCondition::InfiniteTemperature => {
            DensityMatrix::with_electron_count(CMatrix::identity(n, n) * C64::new(count / n as f64, 0.0), count)
        }
        InitialCondition::Fd { temperature } => {
            let e = ctx.eigen().energies();
            let mu = chemical_potential(e, ne, *temperature)?;
            Ok(fd_density(e, mu, *temperature))
        }
        InitialCondition::ParticleHole { from_level, to_level } => {
            if *from_level >= ne || *to_level < ne || *to_level >= n {
                return Err(Error::InvalidArgument(format!(
                    "particle-hole excitation {from_level} -> {to_level} invalid for {ne} electrons in {n} levels"
                )));
            }
            let mut occ = ground_state_occupations(n, ne);
            occ[*from_level] = 0.0;
            occ[*to_level] = 1.0;
            Ok(DensityMatrix::from_populations(occ.as_slice()))
        }
        InitialCondition::LeftLoaded => {
            let site = CMatrix::from_fn(n, n, |i, j| {
                if i == j && i < ne {
                    C64::new(1.0, 0.0)
                } else {
                    C64::default()
                }
            });
            let g = eigen_density(&site, ctx.eigen());
            // Remove rounding asymmetry from the rotation.
            let g = (&g + g.adjoint()) * C64::new(0.5, 0.0);
            DensityMatrix::with_electron_count(g, count)
        }
        InitialCondition::GroundState => Ok(DensityMatrix::from_populations(
            ground_state_occupations(n, ne).as_slice(),
        )),
    }
}

fn preset(
    name: &str,
    description: &str,
    chain: ChainSpec,
    temperature: f64,
    initial: InitialCondition,
    run: RunConfig,
) -> Scenario {
    Scenario {
        name: name.into(),
        description: description.into(),
        chain,
        bath: BathConfig::with_default_peaks(temperature),
        initial,
        generator: GeneratorModes::default(),
        integrator: IntegratorConfig::default(),
        run,
        build: None,
    }
}

/// The four canned experiments.
pub fn builtin_scenarios() -> Vec<Scenario> {
    let chain = |n, t, ne| ChainSpec {
        n_sites: n,
        site_energy: 1.0,
        hopping: t,
        n_electrons: ne,
    };
    vec![
        preset(
            "fig1",
            "12-site half-filled chain relaxing from infinite temperature to Fermi-Dirac at 500 K",
            chain(12, 0.005, 6),
            500.0,
            InitialCondition::InfiniteTemperature,
            RunConfig {
                t_max: 2e6,
                output_interval: 50.0,
                ..RunConfig::default()
            },
        ),
        preset(
            "fig2",
            "8-site chain at 300 K relaxing from a HOMO-2 -> LUMO+2 particle-hole excitation",
            chain(8, 0.05, 4),
            300.0,
            InitialCondition::ParticleHole {
                from_level: 1,
                to_level: 6,
            },
            RunConfig {
                t_max: 1e5,
                output_interval: 20.0,
                ..RunConfig::default()
            },
        ),
        preset(
            "fig3",
            "12-site chain at 5000 K with every electron pushed to the left half",
            chain(12, 0.05, 6),
            5000.0,
            InitialCondition::LeftLoaded,
            RunConfig {
                t_max: 6e4,
                output_interval: 5.0,
                stop_at_equilibrium: false,
                bound_tol: 0.5,
                ..RunConfig::default()
            },
        ),
        preset(
            "fig4",
            "32-site chain warming from its ground state in a 5000 K bath",
            chain(32, 0.05, 16),
            5000.0,
            InitialCondition::GroundState,
            RunConfig {
                t_max: 1e5,
                output_interval: 50.0,
                ..RunConfig::default()
            },
        ),
    ]
}

pub fn builtin(name: &str) -> Option<Scenario> {
    builtin_scenarios().into_iter().find(|s| s.name == name)
}

/// Resolve a built-in name or a path to a TOML file.
pub fn resolve(name_or_path: &str) -> Result<Scenario> {
    if let Some(s) = builtin(name_or_path) {
        return Ok(s);
    }
    let path = Path::new(name_or_path);
    if path.exists() {
        return Scenario::load(path);
    }
    let names: Vec<String> = builtin_scenarios().into_iter().map(|s| s.name).collect();
    Err(Error::Config(format!(
        "'{name_or_path}' is neither a built-in scenario ({}) nor a readable file",
        names.join(", ")
    )))
}
