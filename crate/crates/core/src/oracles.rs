// SPDX-License-Identifier: Apache-2.0

//! Independent reference implementations used to check the generator:
//! exact fermionic operators on a small Fock space, and a secular Redfield
//! equation written directly from its population-transfer and dephasing
//! rates.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::density::{hermitian_eigenvalues, hermiticity_residual, CMatrix, C64};
use crate::error::{Error, Result};
use crate::generator::{Dephasing, GeneratorContext};

pub const MAX_MODES: usize = 6;

/// Annihilation operators on `n` fermionic modes as 2ⁿ × 2ⁿ matrices.
///
/// Basis state `s` has mode `j` occupied when bit `j` is set; `a_j` carries
/// the sign (−1)^(number of occupied modes below j).
#[derive(Debug, Clone)]
pub struct FockSpace {
    n_modes: usize,
    annihilators: Vec<DMatrix<f64>>,
    hoppings: Vec<CMatrix>,
}

impl FockSpace {
    pub fn new(n_modes: usize) -> Result<Self> {
        if n_modes == 0 || n_modes > MAX_MODES {
            return Err(Error::InvalidArgument(format!(
                "Fock space supports 1..={MAX_MODES} modes, got {n_modes}"
            )));
        }
        let dim = 1usize << n_modes;
        let annihilators = (0..n_modes)
            .map(|j| {
                let mut a = DMatrix::zeros(dim, dim);
                for s in 0..dim {
                    if s & (1 << j) != 0 {
                        let below = (s & ((1 << j) - 1)).count_ones();
                        a[(s ^ (1 << j), s)] = if below % 2 == 0 { 1.0 } else { -1.0 };
                    }
                }
                a
            })
            .collect::<Vec<DMatrix<f64>>>();
        let mut hoppings = Vec::with_capacity(n_modes * n_modes);
        for x in 0..n_modes {
            for y in 0..n_modes {
                let op = annihilators[x].transpose() * &annihilators[y];
                hoppings.push(op.map(|v| C64::new(v, 0.0)));
            }
        }
        Ok(FockSpace {
            n_modes,
            annihilators,
            hoppings,
        })
    }

    pub fn n_modes(&self) -> usize {
        self.n_modes
    }

    pub fn dim(&self) -> usize {
        1 << self.n_modes
    }

    pub fn annihilator(&self, j: usize) -> &DMatrix<f64> {
        &self.annihilators[j]
    }

    pub fn creator(&self, j: usize) -> DMatrix<f64> {
        self.annihilators[j].transpose()
    }

    /// a†_x a_y as a complex matrix.
    pub fn hopping(&self, x: usize, y: usize) -> &CMatrix {
        &self.hoppings[x * self.n_modes + y]
    }

    /// γ_xy = Tr(ρ a†_x a_y).
    pub fn one_rdm(&self, rho: &CMatrix) -> CMatrix {
        let n = self.n_modes;
        CMatrix::from_fn(n, n, |x, y| trace_product(rho, self.hopping(x, y)))
    }

    /// Require a Hermitian, unit-trace, positive semidefinite operator of the
    /// right size.
    pub fn validate_state(&self, rho: &CMatrix) -> Result<()> {
        if rho.nrows() != self.dim() || rho.ncols() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: rho.nrows(),
            });
        }
        let herm = hermiticity_residual(rho);
        if herm > 1e-10 {
            return Err(Error::InvalidDensity(format!("state not Hermitian ({herm:e})")));
        }
        let tr = rho.trace();
        if (tr - C64::new(1.0, 0.0)).norm() > 1e-10 {
            return Err(Error::InvalidDensity(format!("state trace {tr} != 1")));
        }
        let min = hermitian_eigenvalues(rho).min();
        if min < -1e-10 {
            return Err(Error::InvalidDensity(format!("negative state eigenvalue {min:e}")));
        }
        Ok(())
    }
}

/// Tr(A B) without forming the product.
pub fn trace_product(a: &CMatrix, b: &CMatrix) -> C64 {
    let mut acc = C64::default();
    for i in 0..a.nrows() {
        for j in 0..a.ncols() {
            acc += a[(i, j)] * b[(j, i)];
        }
    }
    acc
}

/// ρ = M M† / Tr(M M†) for a seeded Gaussian complex M.
pub fn random_mixed_state(n_modes: usize, seed: u64) -> Result<CMatrix> {
    if n_modes == 0 || n_modes > MAX_MODES {
        return Err(Error::InvalidArgument(format!(
            "random states support 1..={MAX_MODES} modes, got {n_modes}"
        )));
    }
    let dim = 1usize << n_modes;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let m = CMatrix::from_fn(dim, dim, |_, _| {
        let re: f64 = StandardNormal.sample(&mut rng);
        let im: f64 = StandardNormal.sample(&mut rng);
        C64::new(re, im)
    });
    let mut rho = &m * m.adjoint();
    let tr = rho.trace().re;
    rho /= C64::new(tr, 0.0);
    // Remove rounding asymmetry.
    Ok((&rho + rho.adjoint()) * C64::new(0.5, 0.0))
}

/// Random physical 1-RDM of dimension `n`: Haar-like eigenvectors from a
/// seeded Gaussian Hermitian matrix, eigenvalues uniform in [0, 1].
pub fn random_one_rdm(n: usize, seed: u64) -> CMatrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let m = CMatrix::from_fn(n, n, |_, _| {
        let re: f64 = StandardNormal.sample(&mut rng);
        let im: f64 = StandardNormal.sample(&mut rng);
        C64::new(re, im)
    });
    let h = (&m + m.adjoint()) * C64::new(0.5, 0.0);
    let v = SymmetricEigen::new(h).eigenvectors;
    let occ = DVector::from_fn(n, |_, _| C64::new(rng.random::<f64>(), 0.0));
    let g = &v * CMatrix::from_diagonal(&occ) * v.adjoint();
    (&g + g.adjoint()) * C64::new(0.5, 0.0)
}

/// Secular Redfield equation for distinguishable levels:
///
/// ```text
/// dρ_aa/dt = Σ_{c≠a} (k_{c→a} ρ_cc − k_{a→c} ρ_aa)
/// dρ_ab/dt = −i ω_ab ρ_ab − [½ Σ_{c≠a} k_{a→c} + ½ Σ_{c≠b} k_{b→c} + Σ_ν Γ_ν(0)(V^ν_aa − V^ν_bb)²] ρ_ab
/// k_{a→c} = 2 Σ_ν Γ_ν(ω_ac) |V^ν_ac|²
/// ```
///
/// In populations-only mode the bracketed dephasing rate is dropped.
pub fn textbook_redfield_rhs(rho: &CMatrix, ctx: &GeneratorContext) -> Result<CMatrix> {
    let n = ctx.dim();
    if rho.nrows() != n || rho.ncols() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: rho.nrows(),
        });
    }
    let es = ctx.eigen();
    let sites: Vec<_> = ctx.couplings().iter().zip(ctx.rates().iter()).collect();
    let transfer = |from: usize, to: usize| -> f64 {
        sites
            .iter()
            .map(|(v, g)| 2.0 * g[(from, to)] * v[(from, to)].powi(2))
            .sum()
    };
    let outflow: Vec<f64> = (0..n)
        .map(|a| (0..n).filter(|&c| c != a).map(|c| transfer(a, c)).sum())
        .collect();

    let mut out = CMatrix::zeros(n, n);
    for a in 0..n {
        let gain: f64 = (0..n)
            .filter(|&c| c != a)
            .map(|c| transfer(c, a) * rho[(c, c)].re)
            .sum();
        let gain_im: f64 = (0..n)
            .filter(|&c| c != a)
            .map(|c| transfer(c, a) * rho[(c, c)].im)
            .sum();
        out[(a, a)] = C64::new(gain, gain_im) - rho[(a, a)] * outflow[a];
        for b in 0..n {
            if a == b {
                continue;
            }
            let mut z = C64::new(0.0, -es.frequency(a, b)) * rho[(a, b)];
            if ctx.dephasing() == Dephasing::Full {
                let pure: f64 = sites
                    .iter()
                    .map(|(v, g)| g[(a, a)] * (v[(a, a)] - v[(b, b)]).powi(2))
                    .sum();
                z -= rho[(a, b)] * (0.5 * outflow[a] + 0.5 * outflow[b] + pure);
            }
            out[(a, b)] = z;
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn anticommutators_are_exact() {
        for n in 1..=MAX_MODES {
            let fs = FockSpace::new(n).unwrap();
            let id = DMatrix::<f64>::identity(fs.dim(), fs.dim());
            for i in 0..n {
                for j in 0..n {
                    let ai = fs.annihilator(i);
                    let aj = fs.annihilator(j);
                    let cj = fs.creator(j);
                    let anti = ai * &cj + &cj * ai;
                    let expect = if i == j {
                        id.clone()
                    } else {
                        DMatrix::zeros(fs.dim(), fs.dim())
                    };
                    assert_eq!(anti, expect, "{{a_{i}, a†_{j}}} on {n} modes");
                    let aa = ai * aj + aj * ai;
                    assert!(aa.iter().all(|&x| x == 0.0));
                }
            }
        }
        assert!(FockSpace::new(7).is_err());
    }

    #[test]
    fn random_states_are_physical_and_reproducible() {
        for seed in 0..5 {
            let rho = random_mixed_state(3, seed).unwrap();
            assert!((rho.trace().re - 1.0).abs() < 1e-14);
            assert!(hermitian_eigenvalues(&rho).min() >= -1e-14);
            assert_eq!(rho, random_mixed_state(3, seed).unwrap());
        }
        assert_ne!(random_mixed_state(3, 1).unwrap(), random_mixed_state(3, 2).unwrap());
    }

    #[test]
    fn one_rdm_is_bounded() {
        let fs = FockSpace::new(4).unwrap();
        for seed in 0..10 {
            let g = fs.one_rdm(&random_mixed_state(4, seed).unwrap());
            assert!(hermiticity_residual(&g) < 1e-12);
            let ev = hermitian_eigenvalues(&g);
            assert!(ev.min() > -1e-12 && ev.max() < 1.0 + 1e-12);
        }
    }

    #[test]
    fn random_one_rdm_is_physical() {
        for seed in 0..10 {
            let g = random_one_rdm(6, seed);
            assert!(hermiticity_residual(&g) == 0.0);
            let ev = hermitian_eigenvalues(&g);
            assert!(ev.min() > -1e-12 && ev.max() < 1.0 + 1e-12);
        }
        assert_eq!(random_one_rdm(5, 3), random_one_rdm(5, 3));
    }

    #[test]
    fn rejects_unphysical_state() {
        let fs = FockSpace::new(2).unwrap();
        let mut rho = CMatrix::identity(4, 4) * C64::new(0.5, 0.0);
        assert!(fs.validate_state(&rho).is_err());
        rho[(0, 0)] = C64::new(-0.5, 0.0);
        rho[(1, 1)] = C64::new(1.0, 0.0);
        assert!(fs.validate_state(&rho).is_err());
        assert!(fs.validate_state(&CMatrix::identity(3, 3)).is_err());
    }
}
