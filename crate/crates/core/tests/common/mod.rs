// SPDX-License-Identifier: Apache-2.0
#![allow(dead_code)]

use pauli_redfield::bath::BathSpec;
use pauli_redfield::generator::{Blocking, Dephasing, GeneratorContext};
use pauli_redfield::model::ChainSpec;
use pauli_redfield::oracles::random_one_rdm;
use pauli_redfield::CMatrix;

/// Random physical 1-RDM: random eigenvectors, eigenvalues uniform in [0, 1].
pub fn random_gamma(n: usize, seed: u64) -> CMatrix {
    random_one_rdm(n, seed)
}

pub fn chain_context(
    n: usize,
    hopping: f64,
    temperature: f64,
    blocking: Blocking,
    dephasing: Dephasing,
) -> GeneratorContext {
    let chain = ChainSpec::new(n, 1.0, hopping, n / 2).unwrap();
    GeneratorContext::for_chain(&chain, &BathSpec::default_for(temperature, n), blocking, dephasing).unwrap()
}

pub fn max_abs(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}
