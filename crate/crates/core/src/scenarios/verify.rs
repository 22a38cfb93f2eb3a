// SPDX-License-Identifier: Apache-2.0

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::bath::build_rate_table;
use crate::bath::BathSpec;
use crate::density::{hermiticity_residual, CMatrix, DensityMatrix};
use crate::error::{Error, Result};
use crate::generator::{
    mk_identity_check, pauli_kinetics_rhs, rhs_fast, rhs_reference, rhs_reference_with_signs, rhs_unblocked, Blocking,
    Dephasing, GeneratorContext,
};
use crate::model::{chemical_potential, fd_density, ChainSpec};
use crate::oracles::{random_mixed_state, random_one_rdm, textbook_redfield_rhs, FockSpace, MAX_MODES};

use super::builtin_scenarios;

/// Signs of the four dissipative terms with the third one flipped.
const MUTANT_SIGNS: [f64; 4] = [1.0, 1.0, 1.0, -1.0];

#[derive(Debug, Clone, PartialEq)]
pub struct VerifyOptions {
    /// Largest Fock-space size for the double-commutator suite (2..=6).
    pub modes: usize,
    /// Random index tuples per state.
    pub trials: usize,
    /// Random correlated states per mode count.
    pub states: usize,
    pub seed: u64,
    /// Replace the generator under test by one with a flipped dissipator
    /// sign. The affected suites must then fail.
    pub inject_sign_error: bool,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions {
            modes: 4,
            trials: 200,
            states: 20,
            seed: 0,
            inject_sign_error: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub name: String,
    pub passed: bool,
    pub checks: usize,
    pub max_deviation: f64,
    pub tolerance: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub passed: bool,
    pub injected_sign_error: bool,
    pub suite: Vec<SuiteReport>,
}

impl VerifyReport {
    pub fn to_toml_string(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn get(&self, name: &str) -> Option<&SuiteReport> {
        self.suite.iter().find(|s| s.name == name)
    }
}

struct Tally {
    checks: usize,
    worst: f64,
}

impl Tally {
    fn new() -> Self {
        Tally { checks: 0, worst: 0.0 }
    }

    fn record(&mut self, deviation: f64) {
        self.checks += 1;
        // NaN counts as a failure.
        self.worst = if deviation.is_nan() {
            f64::INFINITY
        } else {
            self.worst.max(deviation)
        };
    }

    fn finish(self, name: &str, tolerance: f64) -> SuiteReport {
        SuiteReport {
            name: name.into(),
            passed: self.checks > 0 && self.worst < tolerance,
            checks: self.checks,
            max_deviation: self.worst,
            tolerance,
        }
    }
}

fn max_abs(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

fn chain_ctx(
    n: usize,
    hopping: f64,
    temperature: f64,
    blocking: Blocking,
    dephasing: Dephasing,
) -> Result<GeneratorContext> {
    let chain = ChainSpec::new(n, 1.0, hopping, n / 2)?;
    GeneratorContext::for_chain(&chain, &BathSpec::default_for(temperature, n), blocking, dephasing)
}

type Generator = fn(&CMatrix, &GeneratorContext) -> Result<CMatrix>;

fn mutant(gamma: &CMatrix, ctx: &GeneratorContext) -> Result<CMatrix> {
    rhs_reference_with_signs(gamma, ctx, MUTANT_SIGNS)
}

/// Run every property suite and collect a pass/fail report.
pub fn verify(options: &VerifyOptions) -> Result<VerifyReport> {
    if !(2..=MAX_MODES).contains(&options.modes) {
        return Err(Error::Config(format!("--modes must be in 2..={MAX_MODES}")));
    }
    if options.trials == 0 || options.states == 0 {
        return Err(Error::Config("--trials and --states must be positive".into()));
    }
    let under_test: Generator = if options.inject_sign_error { mutant } else { rhs_fast };
    let mut suites = Vec::new();

    // Canonical anticommutation relations, exactly.
    let mut t = Tally::new();
    for n in 1..=options.modes {
        let fs = FockSpace::new(n)?;
        for i in 0..n {
            for j in 0..n {
                let (a, c) = (fs.annihilator(i), fs.creator(j));
                let mut anti = a * &c + &c * a;
                if i == j {
                    anti -= nalgebra::DMatrix::identity(fs.dim(), fs.dim());
                }
                t.record(anti.amax());
                let aj = fs.annihilator(j);
                t.record((a * aj + aj * a).amax());
            }
        }
    }
    suites.push(t.finish("anticommutators", f64::MIN_POSITIVE));

    // Closed-form double commutator against the explicit Fock-space operator.
    let mut t = Tally::new();
    let mut rng = ChaCha8Rng::seed_from_u64(options.seed);
    for n in 2..=options.modes {
        let fs = FockSpace::new(n)?;
        for k in 0..options.states {
            let rho = random_mixed_state(n, options.seed.wrapping_mul(1_000_003).wrapping_add(k as u64))?;
            for _ in 0..options.trials {
                let idx: [usize; 6] = std::array::from_fn(|_| rng.random_range(0..n));
                let (lhs, rhs) = mk_identity_check(idx, &rho, &fs)?;
                t.record((lhs - rhs).norm());
            }
        }
    }
    suites.push(t.finish("double-commutator", 1e-10));

    // Bath rates of every built-in scenario.
    let mut t = Tally::new();
    for s in builtin_scenarios() {
        let ctx = s.context()?;
        let table = build_rate_table(ctx.eigen(), &s.bath_spec()?)?;
        t.record(table.detailed_balance_residual(ctx.eigen()));
    }
    suites.push(t.finish("detailed-balance", 1e-12));

    // Fermi-Dirac populations are a fixed point.
    let mut t = Tally::new();
    for n in [2usize, 8, 12] {
        for temp in [300.0, 500.0, 5000.0] {
            let ctx = chain_ctx(n, 0.005, temp, Blocking::Blocked, Dephasing::Full)?;
            let e = ctx.eigen().energies();
            let fd = fd_density(e, chemical_potential(e, n / 2, temp)?, temp);
            t.record(max_abs(&under_test(fd.matrix(), &ctx)?) / ctx.rate_scale());
        }
    }
    suites.push(t.finish("fd-stationarity", 1e-13));

    // Trace and Hermiticity of dγ/dt on random states.
    let mut tr = Tally::new();
    let mut herm = Tally::new();
    for n in [2usize, 4, 8] {
        for blocking in [Blocking::Blocked, Blocking::Unblocked] {
            for dephasing in [Dephasing::Full, Dephasing::PopulationsOnly] {
                let ctx = chain_ctx(n, 0.05, 500.0, blocking, dephasing)?;
                for k in 0..5u64 {
                    let g = random_one_rdm(n, options.seed + 17 * k + n as u64);
                    let d = under_test(&g, &ctx)?;
                    let scale: f64 = d
                        .diagonal()
                        .iter()
                        .map(|z| z.norm())
                        .sum::<f64>()
                        .max(f64::MIN_POSITIVE);
                    tr.record(d.trace().norm() / scale);
                    herm.record(hermiticity_residual(&d) / max_abs(&d).max(f64::MIN_POSITIVE));
                }
            }
        }
    }
    suites.push(tr.finish("trace-preservation", 1e-12));
    suites.push(herm.finish("hermiticity-preservation", 1e-12));

    // Fast contraction against the literal masked summation.
    let mut t = Tally::new();
    for n in [2usize, 4, 8, 12] {
        let ctx = chain_ctx(n, 0.05, 500.0, Blocking::Blocked, Dephasing::Full)?;
        for k in 0..5u64 {
            let g = random_one_rdm(n, options.seed + 1000 + k);
            t.record(max_abs(&(rhs_reference(&g, &ctx)? - under_test(&g, &ctx)?)));
        }
    }
    suites.push(t.finish("fast-vs-reference", 1e-12));

    // Unblocked generator against the distinguishable-level Redfield form.
    let mut t = Tally::new();
    for n in [2usize, 4, 8, 12] {
        for dephasing in [Dephasing::Full, Dephasing::PopulationsOnly] {
            let ctx = chain_ctx(n, 0.05, 500.0, Blocking::Unblocked, dephasing)?;
            for k in 0..3u64 {
                let g = random_one_rdm(n, options.seed + 2000 + k);
                t.record(max_abs(&(rhs_unblocked(&g, &ctx)? - textbook_redfield_rhs(&g, &ctx)?)));
            }
        }
    }
    suites.push(t.finish("unblocked-vs-textbook", 1e-12));

    // Diagonal states close onto blocked rate equations.
    let mut t = Tally::new();
    for n in [4usize, 8] {
        let ctx = chain_ctx(n, 0.05, 300.0, Blocking::Blocked, Dephasing::Full)?;
        let k = ctx.kinetic_rates();
        for _ in 0..5 {
            let pops: Vec<f64> = (0..n).map(|_| rng.random::<f64>()).collect();
            let g = DensityMatrix::from_populations(&pops);
            let d = under_test(g.matrix(), &ctx)?;
            let dn = pauli_kinetics_rhs(&pops, &k, Blocking::Blocked)?;
            let mut dev = 0.0f64;
            for a in 0..n {
                for b in 0..n {
                    let expect = if a == b { dn[a] } else { 0.0 };
                    dev = dev.max((d[(a, b)] - expect).norm());
                }
            }
            t.record(dev / ctx.rate_scale());
        }
    }
    suites.push(t.finish("blocked-kinetics", 1e-13));

    Ok(VerifyReport {
        passed: suites.iter().all(|s| s.passed),
        injected_sign_error: options.inject_sign_error,
        suite: suites,
    })
}
