// SPDX-License-Identifier: Apache-2.0

//! Tight-binding (Hückel) chains, their eigenbasis, and Fermi-Dirac filling.
//!
//! All energies are in Hartree with ħ = 1, so a transition frequency
//! ω_ab = ε_a − ε_b carries the same number as the energy gap.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::density::DensityMatrix;
use crate::error::{Error, Result};

/// Boltzmann constant in Hartree per Kelvin.
pub const K_BOLTZMANN: f64 = 3.166811563e-6;

const SYMMETRY_TOL: f64 = 1e-12;

/// Inverse temperature β = 1/(k_B T) in 1/Hartree.
pub fn beta(temperature: f64) -> f64 {
    1.0 / (K_BOLTZMANN * temperature)
}

/// A uniform open chain of spinless sites with nearest-neighbour hopping.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChainSpec {
    pub n_sites: usize,
    pub site_energy: f64,
    pub hopping: f64,
    pub n_electrons: usize,
}

impl ChainSpec {
    pub fn new(n_sites: usize, site_energy: f64, hopping: f64, n_electrons: usize) -> Result<Self> {
        let spec = ChainSpec {
            n_sites,
            site_energy,
            hopping,
            n_electrons,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_sites < 2 {
            return Err(Error::InvalidChain(format!(
                "need at least 2 sites, got {}",
                self.n_sites
            )));
        }
        if self.n_electrons > self.n_sites {
            return Err(Error::InvalidChain(format!(
                "{} electrons do not fit in {} spinless orbitals",
                self.n_electrons, self.n_sites
            )));
        }
        if !self.site_energy.is_finite() || !self.hopping.is_finite() {
            return Err(Error::InvalidChain("non-finite energy parameter".into()));
        }
        Ok(())
    }
}

/// Site-basis Hamiltonian: `site_energy` on the diagonal, `hopping` on the
/// first off-diagonals, no periodic wrap.
pub fn build_chain(spec: &ChainSpec) -> Result<DMatrix<f64>> {
    spec.validate()?;
    let n = spec.n_sites;
    Ok(DMatrix::from_fn(n, n, |i, j| {
        if i == j {
            spec.site_energy
        } else if i.abs_diff(j) == 1 {
            spec.hopping
        } else {
            0.0
        }
    }))
}

/// Orbital energies (ascending) and the orthogonal matrix whose columns are
/// the eigenvectors expressed on sites.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenSystem {
    energies: DVector<f64>,
    orbitals: DMatrix<f64>,
    frequencies: DMatrix<f64>,
}

impl EigenSystem {
    pub fn dim(&self) -> usize {
        self.energies.len()
    }

    pub fn energies(&self) -> &DVector<f64> {
        &self.energies
    }

    /// `orbitals()[(site, level)]`.
    pub fn orbitals(&self) -> &DMatrix<f64> {
        &self.orbitals
    }

    /// ω_ab = ε_a − ε_b.
    pub fn frequencies(&self) -> &DMatrix<f64> {
        &self.frequencies
    }

    pub fn frequency(&self, a: usize, b: usize) -> f64 {
        self.frequencies[(a, b)]
    }
}

/// Diagonalize a real symmetric matrix.
///
/// Eigenvalues come back ascending. Each eigenvector is signed so that its
/// largest-magnitude component is positive; among components tied within
/// 1e-10 the lowest index wins.
pub fn diagonalize(h: &DMatrix<f64>) -> Result<EigenSystem> {
    if !h.is_square() {
        return Err(Error::DimensionMismatch {
            expected: h.nrows(),
            found: h.ncols(),
        });
    }
    let n = h.nrows();
    let asym = (h - h.transpose()).amax();
    if asym > SYMMETRY_TOL {
        return Err(Error::NotSymmetric(asym));
    }
    let sym = (h + h.transpose()) * 0.5;
    let eig = SymmetricEigen::try_new(sym, f64::EPSILON, 100_000).ok_or(Error::EigenNonConvergence)?;

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));

    let energies = DVector::from_iterator(n, order.iter().map(|&k| eig.eigenvalues[k]));
    let mut orbitals = DMatrix::zeros(n, n);
    for (col, &k) in order.iter().enumerate() {
        let v = eig.eigenvectors.column(k);
        let max = v.amax();
        let pivot = v
            .iter()
            .position(|x| x.abs() >= max - 1e-10)
            .expect("eigenvector has at least one component");
        let sign = if v[pivot] < 0.0 { -1.0 } else { 1.0 };
        orbitals.set_column(col, &(v * sign));
    }
    let frequencies = DMatrix::from_fn(n, n, |a, b| energies[a] - energies[b]);
    Ok(EigenSystem {
        energies,
        orbitals,
        frequencies,
    })
}

/// Site-diagonal system-bath couplings rotated into the eigenbasis:
/// `V^ν_ij = U_{νi} U_{νj}`, one rank-one projector per site.
#[derive(Debug, Clone, PartialEq)]
pub struct CouplingSet {
    matrices: Vec<DMatrix<f64>>,
}

impl CouplingSet {
    pub fn n_sites(&self) -> usize {
        self.matrices.len()
    }

    pub fn site(&self, nu: usize) -> &DMatrix<f64> {
        &self.matrices[nu]
    }

    pub fn iter(&self) -> impl Iterator<Item = &DMatrix<f64>> {
        self.matrices.iter()
    }
}

pub fn coupling_matrices(es: &EigenSystem) -> CouplingSet {
    let u = es.orbitals();
    let matrices = (0..es.dim())
        .map(|nu| {
            let row = u.row(nu).transpose();
            &row * row.transpose()
        })
        .collect();
    CouplingSet { matrices }
}

fn fermi(x: f64) -> f64 {
    1.0 / (1.0 + x.exp())
}

fn filling(energies: &DVector<f64>, mu: f64, beta: f64) -> f64 {
    energies.iter().map(|e| fermi(beta * (e - mu))).sum()
}

/// Chemical potential that places `n_electrons` in the given levels at
/// temperature `temperature` (Kelvin), found by bisection.
pub fn chemical_potential(energies: &DVector<f64>, n_electrons: usize, temperature: f64) -> Result<f64> {
    let n = energies.len();
    if n_electrons == 0 || n_electrons >= n {
        return Err(Error::InvalidArgument(format!(
            "chemical potential is unbounded for {n_electrons} electrons in {n} levels"
        )));
    }
    if !(temperature > 0.0) || !temperature.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "temperature must be positive, got {temperature}"
        )));
    }
    let beta = beta(temperature);
    let kt = K_BOLTZMANN * temperature;
    let target = n_electrons as f64;
    let lo = energies.min() - 50.0 * kt;
    let hi = energies.max() + 50.0 * kt;
    // At low temperature the filling is flat to rounding across the gap; take
    // the midpoint of the plateau where it equals the target.
    let below = bisect(lo, hi, |mu| filling(energies, mu, beta) < target);
    let above = bisect(lo, hi, |mu| filling(energies, mu, beta) <= target);
    Ok(0.5 * (below + above))
}

/// Boundary of the prefix of `[lo, hi]` on which the monotone predicate holds.
fn bisect(mut lo: f64, mut hi: f64, holds: impl Fn(f64) -> bool) -> f64 {
    loop {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            return mid;
        }
        if holds(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
}

/// Occupations 1/(1 + e^{β(ε_i − μ)}).
pub fn fd_occupations(energies: &DVector<f64>, mu: f64, temperature: f64) -> DVector<f64> {
    let beta = beta(temperature);
    energies.map(|e| fermi(beta * (e - mu)))
}

/// Diagonal Fermi-Dirac density matrix in the eigenbasis.
pub fn fd_density(energies: &DVector<f64>, mu: f64, temperature: f64) -> DensityMatrix {
    DensityMatrix::from_populations(fd_occupations(energies, mu, temperature).as_slice())
}

/// Zero-temperature step filling of the lowest `n_electrons` levels.
pub fn ground_state_occupations(n_levels: usize, n_electrons: usize) -> DVector<f64> {
    DVector::from_fn(n_levels, |i, _| if i < n_electrons { 1.0 } else { 0.0 })
}
