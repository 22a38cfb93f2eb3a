// SPDX-License-Identifier: Apache-2.0

//! Browser bindings: propagate a chain, compute its Fermi-Dirac filling and
//! its thermal localization map.

use pauli_redfield::generator::{Blocking, Dephasing};
use pauli_redfield::integrator::IntegratorConfig;
use pauli_redfield::model::{
    build_chain, chemical_potential, diagonalize, fd_density, fd_occupations, ChainSpec, EigenSystem,
};
use pauli_redfield::observables::site_density;
use pauli_redfield::scenarios::{self, BathConfig, GeneratorModes, InitialCondition, RunConfig, Scenario};
use wasm_bindgen::prelude::*;

type Fallible<T> = Result<T, String>;

fn msg(e: pauli_redfield::Error) -> String {
    e.to_string()
}

fn js(e: String) -> JsError {
    JsError::new(&e)
}

fn initial_from(kind: &str, n_sites: usize, n_electrons: usize) -> Fallible<InitialCondition> {
    Ok(match kind {
        "infinite-temperature" => InitialCondition::InfiniteTemperature,
        "left-loaded" => InitialCondition::LeftLoaded,
        "ground-state" => InitialCondition::GroundState,
        "particle-hole" => {
            if n_electrons == 0 || n_electrons >= n_sites {
                return Err("a particle-hole start needs a partially filled chain".into());
            }
            InitialCondition::ParticleHole {
                from_level: n_electrons - 1,
                to_level: n_electrons,
            }
        }
        other => return Err(format!("unknown initial condition '{other}'")),
    })
}

/// Sampled trajectory of one run. Per-level series are returned row-major,
/// one row of `n_sites` values per sample.
#[wasm_bindgen]
pub struct Simulation {
    n_sites: usize,
    times: Vec<f64>,
    populations: Vec<f64>,
    site_populations: Vec<f64>,
    ground_state_probability: Vec<f64>,
    fd_targets: Vec<f64>,
    energies: Vec<f64>,
    max_occupation: f64,
    equilibrated: bool,
}

#[allow(clippy::too_many_arguments)]
fn simulate(
    n_sites: usize,
    hopping: f64,
    n_electrons: usize,
    temperature: f64,
    initial: &str,
    blocking: bool,
    dephasing: bool,
    t_max: f64,
    output_interval: f64,
) -> Fallible<Simulation> {
    let scenario = Scenario {
        name: "demo".into(),
        description: String::new(),
        chain: ChainSpec::new(n_sites, 1.0, hopping, n_electrons).map_err(msg)?,
        bath: BathConfig::with_default_peaks(temperature),
        initial: initial_from(initial, n_sites, n_electrons)?,
        generator: GeneratorModes {
            blocking: if blocking {
                Blocking::Blocked
            } else {
                Blocking::Unblocked
            },
            dephasing: if dephasing {
                Dephasing::Full
            } else {
                Dephasing::PopulationsOnly
            },
        },
        integrator: IntegratorConfig::default(),
        run: RunConfig {
            t_max,
            output_interval,
            bound_tol: f64::INFINITY,
            ..RunConfig::default()
        },
        build: None,
    };
    let r = scenarios::run(&scenario).map_err(msg)?;
    let samples = &r.series.samples;
    Ok(Simulation {
        n_sites,
        times: r.series.times(),
        populations: samples.iter().flat_map(|s| s.populations.iter().copied()).collect(),
        site_populations: samples
            .iter()
            .flat_map(|s| s.site_populations.iter().copied())
            .collect(),
        ground_state_probability: r.series.ground_state_probabilities(),
        fd_targets: r.summary.fd_targets.clone(),
        energies: r.context.eigen().energies().iter().copied().collect(),
        max_occupation: r.summary.max_occupation_eigenvalue,
        equilibrated: r.summary.equilibrated,
    })
}

#[wasm_bindgen]
impl Simulation {
    /// `initial` is one of `infinite-temperature`, `left-loaded`,
    /// `ground-state` or `particle-hole` (HOMO to LUMO).
    #[wasm_bindgen(constructor)]
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        n_sites: usize,
        hopping: f64,
        n_electrons: usize,
        temperature: f64,
        initial: &str,
        blocking: bool,
        dephasing: bool,
        t_max: f64,
        output_interval: f64,
    ) -> Result<Simulation, JsError> {
        simulate(
            n_sites,
            hopping,
            n_electrons,
            temperature,
            initial,
            blocking,
            dephasing,
            t_max,
            output_interval,
        )
        .map_err(js)
    }

    #[wasm_bindgen(getter)]
    pub fn n_sites(&self) -> usize {
        self.n_sites
    }

    #[wasm_bindgen(getter)]
    pub fn times(&self) -> Vec<f64> {
        self.times.clone()
    }

    /// Eigenbasis populations.
    #[wasm_bindgen(getter)]
    pub fn populations(&self) -> Vec<f64> {
        self.populations.clone()
    }

    #[wasm_bindgen(getter)]
    pub fn site_populations(&self) -> Vec<f64> {
        self.site_populations.clone()
    }

    #[wasm_bindgen(getter)]
    pub fn ground_state_probability(&self) -> Vec<f64> {
        self.ground_state_probability.clone()
    }

    #[wasm_bindgen(getter)]
    pub fn fd_targets(&self) -> Vec<f64> {
        self.fd_targets.clone()
    }

    #[wasm_bindgen(getter)]
    pub fn energies(&self) -> Vec<f64> {
        self.energies.clone()
    }

    /// Largest occupation eigenvalue seen at any accepted step.
    #[wasm_bindgen(getter)]
    pub fn max_occupation(&self) -> f64 {
        self.max_occupation
    }

    #[wasm_bindgen(getter)]
    pub fn equilibrated(&self) -> bool {
        self.equilibrated
    }
}

fn chain_levels(n_sites: usize, hopping: f64) -> Fallible<EigenSystem> {
    let chain = ChainSpec::new(n_sites, 1.0, hopping, 0).map_err(msg)?;
    diagonalize(&build_chain(&chain).map_err(msg)?).map_err(msg)
}

fn fd_table(n_sites: usize, hopping: f64, n_electrons: usize, temperature: f64) -> Fallible<Vec<f64>> {
    let es = chain_levels(n_sites, hopping)?;
    let e = es.energies();
    let mu = chemical_potential(e, n_electrons, temperature).map_err(msg)?;
    let n = fd_occupations(e, mu, temperature);
    let mut out = vec![mu];
    for (ei, ni) in e.iter().zip(n.iter()) {
        out.push(*ei);
        out.push(*ni);
    }
    Ok(out)
}

fn localization_table(n_sites: usize, hopping: f64, n_electrons: usize, temperature: f64) -> Fallible<Vec<f64>> {
    let es = chain_levels(n_sites, hopping)?;
    let mu = chemical_potential(es.energies(), n_electrons, temperature).map_err(msg)?;
    let gamma = fd_density(es.energies(), mu, temperature);
    let g = site_density(gamma.matrix(), &es);
    Ok((0..n_sites)
        .flat_map(|x| (0..n_sites).map(move |y| (x, y)))
        .map(|(x, y)| g[(x, y)].norm())
        .collect())
}

/// `[mu, ε_1, n_1, ε_2, n_2, ...]` for the Fermi-Dirac filling of a chain.
#[wasm_bindgen]
pub fn fermi_dirac(n_sites: usize, hopping: f64, n_electrons: usize, temperature: f64) -> Result<Vec<f64>, JsError> {
    fd_table(n_sites, hopping, n_electrons, temperature).map_err(js)
}

/// Row-major `n_sites × n_sites` map of |γ(x, x′)| in the site basis for the
/// Fermi-Dirac state at `temperature`. The page takes logarithms itself.
#[wasm_bindgen]
pub fn localization(n_sites: usize, hopping: f64, n_electrons: usize, temperature: f64) -> Result<Vec<f64>, JsError> {
    localization_table(n_sites, hopping, n_electrons, temperature).map_err(js)
}
