// SPDX-License-Identifier: Apache-2.0

//! Right-hand side of the Pauli-blocked secular Redfield equation for the
//! one-electron density matrix γ (eigenbasis, ħ = 1):
//!
//! ```text
//! dγ_ab/dt = −i ω_ab γ_ab − (T1 + T2 − T3 − T4)_ab
//! T1_ab = Σ S_{a,f,f,c} Γ(ω_cf) V_ae V_fc γ_cb η_ef
//! T2    = T1†
//! T3_ab = Σ S_{d,b,a,c} Γ(ω_ca) V_de V_ac γ_cd η_eb
//! T4    = T3†
//! ```
//!
//! with η = I − γ, summation over the repeated level indices and over sites ν,
//! and the secular mask S. Setting η = I recovers ordinary secular Redfield.
//!
//! Two evaluations are provided: [`rhs_reference`] performs the masked sums
//! term by term, [`rhs_fast`] uses the rank-one structure of each V^ν and
//! costs O(N_sites · N²).

use nalgebra::{DMatrix, DVector};

use crate::bath::RateTable;
use crate::bath::{build_rate_table, BathSpec};
use crate::density::{hole_matrix, CMatrix, C64};
use crate::error::{Error, Result};
use crate::model::{build_chain, coupling_matrices, diagonalize, ChainSpec, CouplingSet, EigenSystem};
use crate::oracles::{trace_product, FockSpace};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Blocking {
    /// Hole factors η = I − γ.
    Blocked,
    /// η replaced by the identity.
    Unblocked,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Dephasing {
    /// All dissipative terms act on every element.
    Full,
    /// The dissipator sees only the populations and only acts on them;
    /// coherences evolve under the coherent term alone.
    PopulationsOnly,
}

/// S_{a,b,c,d} = δ_ab δ_cd + δ_bc δ_ad (1 − δ_ab δ_cd).
pub fn secular_mask(a: usize, b: usize, c: usize, d: usize) -> u8 {
    let first = a == b && c == d;
    let second = b == c && a == d;
    u8::from(first) + u8::from(second && !first)
}

/// Everything the generator needs besides γ itself.
#[derive(Debug, Clone)]
pub struct GeneratorContext {
    eigen: EigenSystem,
    couplings: CouplingSet,
    rates: RateTable,
    blocking: Blocking,
    dephasing: Dephasing,
}

impl GeneratorContext {
    pub fn new(
        eigen: EigenSystem,
        couplings: CouplingSet,
        rates: RateTable,
        blocking: Blocking,
        dephasing: Dephasing,
    ) -> Result<Self> {
        let n = eigen.dim();
        for found in [couplings.n_sites(), rates.n_sites()] {
            if found != n {
                return Err(Error::DimensionMismatch { expected: n, found });
            }
        }
        for m in couplings.iter().chain(rates.iter()) {
            if m.nrows() != n || m.ncols() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    found: m.nrows(),
                });
            }
        }
        Ok(GeneratorContext {
            eigen,
            couplings,
            rates,
            blocking,
            dephasing,
        })
    }

    /// Diagonalize `chain`, rotate the couplings and tabulate the rates.
    pub fn for_chain(chain: &ChainSpec, bath: &BathSpec, blocking: Blocking, dephasing: Dephasing) -> Result<Self> {
        let eigen = diagonalize(&build_chain(chain)?)?;
        let couplings = coupling_matrices(&eigen);
        let rates = build_rate_table(&eigen, bath)?;
        Self::new(eigen, couplings, rates, blocking, dephasing)
    }

    pub fn dim(&self) -> usize {
        self.eigen.dim()
    }

    pub fn eigen(&self) -> &EigenSystem {
        &self.eigen
    }

    pub fn couplings(&self) -> &CouplingSet {
        &self.couplings
    }

    pub fn rates(&self) -> &RateTable {
        &self.rates
    }

    pub fn blocking(&self) -> Blocking {
        self.blocking
    }

    pub fn dephasing(&self) -> Dephasing {
        self.dephasing
    }

    pub fn with_modes(&self, blocking: Blocking, dephasing: Dephasing) -> Self {
        GeneratorContext {
            blocking,
            dephasing,
            ..self.clone()
        }
    }

    /// Population transfer rates `K[(i, j)]` for j → i:
    /// 2 Σ_ν Γ_ν(ω_ji) (V^ν_ij)².
    pub fn kinetic_rates(&self) -> DMatrix<f64> {
        let n = self.dim();
        let mut k = DMatrix::zeros(n, n);
        for (v, g) in self.couplings.iter().zip(self.rates.iter()) {
            for i in 0..n {
                for j in 0..n {
                    k[(i, j)] += 2.0 * g[(j, i)] * v[(i, j)] * v[(i, j)];
                }
            }
        }
        k
    }

    /// Largest entry of [`kinetic_rates`](Self::kinetic_rates).
    pub fn rate_scale(&self) -> f64 {
        self.kinetic_rates().max()
    }

    /// Evaluate with this context's blocking and dephasing modes.
    pub fn rhs(&self, gamma: &CMatrix) -> Result<CMatrix> {
        rhs_fast(gamma, self)
    }

    fn check_dim(&self, gamma: &CMatrix) -> Result<()> {
        let n = self.dim();
        if gamma.nrows() != n || gamma.ncols() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: gamma.nrows(),
            });
        }
        Ok(())
    }

    fn hole(&self, gamma: &CMatrix, blocking: Blocking) -> CMatrix {
        match blocking {
            Blocking::Blocked => hole_matrix(gamma),
            Blocking::Unblocked => CMatrix::identity(gamma.nrows(), gamma.ncols()),
        }
    }

    /// γ as seen by the dissipator.
    fn dissipator_input(&self, gamma: &CMatrix) -> CMatrix {
        match self.dephasing {
            Dephasing::Full => gamma.clone(),
            Dephasing::PopulationsOnly => CMatrix::from_diagonal(&gamma.diagonal()),
        }
    }
}

fn coherent_term(gamma: &CMatrix, es: &EigenSystem) -> CMatrix {
    CMatrix::from_fn(gamma.nrows(), gamma.ncols(), |a, b| {
        C64::new(0.0, -es.frequency(a, b)) * gamma[(a, b)]
    })
}

fn assemble(gamma: &CMatrix, ctx: &GeneratorContext, dissipator: CMatrix) -> CMatrix {
    let mut out = coherent_term(gamma, &ctx.eigen);
    match ctx.dephasing {
        Dephasing::Full => out -= dissipator,
        Dephasing::PopulationsOnly => {
            for a in 0..gamma.nrows() {
                out[(a, a)] -= dissipator[(a, a)];
            }
        }
    }
    out
}

/// The four dissipative terms summed term by term with the mask applied
/// inside the loops. O(N_sites · N⁵); meant as a correctness anchor.
pub fn dissipator_terms_reference(gamma: &CMatrix, eta: &CMatrix, ctx: &GeneratorContext) -> [CMatrix; 4] {
    let n = gamma.nrows();
    let mut t = [
        CMatrix::zeros(n, n),
        CMatrix::zeros(n, n),
        CMatrix::zeros(n, n),
        CMatrix::zeros(n, n),
    ];
    for (v, g) in ctx.couplings.iter().zip(ctx.rates.iter()) {
        let coef = |x: f64| C64::new(x, 0.0);
        for a in 0..n {
            for b in 0..n {
                let (mut t1, mut t2, mut t3, mut t4) = (C64::default(), C64::default(), C64::default(), C64::default());
                for x in 0..n {
                    for e in 0..n {
                        for y in 0..n {
                            // T1: x = c, y = f.
                            if secular_mask(a, y, y, x) == 1 {
                                t1 += coef(g[(x, y)] * v[(a, e)] * v[(y, x)]) * gamma[(x, b)] * eta[(e, y)];
                            }
                            // T2: x = d, y = f. Coefficient daggered with η ordered as its conjugate.
                            if secular_mask(b, y, y, x) == 1 {
                                t2 += coef(g[(x, y)] * v[(b, e)] * v[(y, x)]).conj() * gamma[(a, x)] * eta[(y, e)];
                            }
                            // T3, T4: x = c, y = d.
                            if secular_mask(y, b, a, x) == 1 {
                                t3 += coef(g[(x, a)] * v[(y, e)] * v[(a, x)]) * gamma[(x, y)] * eta[(e, b)];
                            }
                            if secular_mask(x, a, b, y) == 1 {
                                t4 += coef(g[(y, b)] * v[(x, e)] * v[(b, y)]).conj() * gamma[(x, y)] * eta[(a, e)];
                            }
                        }
                    }
                }
                t[0][(a, b)] += t1;
                t[1][(a, b)] += t2;
                t[2][(a, b)] += t3;
                t[3][(a, b)] += t4;
            }
        }
    }
    t
}

/// Literal masked summation; uses the context's blocking mode.
pub fn rhs_reference(gamma: &CMatrix, ctx: &GeneratorContext) -> Result<CMatrix> {
    rhs_reference_with_signs(gamma, ctx, [1.0, 1.0, -1.0, -1.0])
}

/// [`rhs_reference`] with the dissipator assembled as Σ_k signs[k]·T_k.
/// Anything other than `[1, 1, -1, -1]` is a deliberately broken generator,
/// used as a negative control by the verification suites.
pub fn rhs_reference_with_signs(gamma: &CMatrix, ctx: &GeneratorContext, signs: [f64; 4]) -> Result<CMatrix> {
    ctx.check_dim(gamma)?;
    let input = ctx.dissipator_input(gamma);
    let eta = ctx.hole(&input, ctx.blocking);
    let terms = dissipator_terms_reference(&input, &eta, ctx);
    let mut d = CMatrix::zeros(gamma.nrows(), gamma.ncols());
    for (t, s) in terms.iter().zip(signs) {
        d += t * C64::new(s, 0.0);
    }
    Ok(assemble(gamma, ctx, d))
}

/// Dissipator D = X + X† with X = T1 − T3, exploiting V^ν = u uᵀ and the
/// collapsed masks S_{a,f,f,c} = δ_ac, S_{d,b,a,c} = δ_db δ_ac for a ≠ b and
/// S_{d,a,a,c} = δ_dc.
fn dissipator_fast(gamma: &CMatrix, eta: &CMatrix, ctx: &GeneratorContext) -> CMatrix {
    let n = gamma.nrows();
    let u_all = ctx.eigen.orbitals();
    let mut alpha = vec![C64::default(); n];
    let mut gain = vec![C64::default(); n];
    let mut pure = CMatrix::zeros(n, n);
    let mut w = vec![C64::default(); n];
    for (nu, g) in ctx.rates.iter().enumerate() {
        let u = u_all.row(nu);
        // w_f = Σ_e u_e η_ef
        for f in 0..n {
            w[f] = (0..n).map(|e| eta[(e, f)] * u[e]).sum();
        }
        for a in 0..n {
            let ua2 = u[a] * u[a];
            let s: C64 = (0..n).map(|f| w[f] * (g[(a, f)] * u[f])).sum();
            alpha[a] += s * ua2;
            let fill: C64 = (0..n).map(|c| gamma[(c, c)] * (g[(c, a)] * u[c] * u[c])).sum();
            gain[a] += w[a] * fill * u[a];
            let p = g[(a, a)] * ua2;
            for b in 0..n {
                pure[(a, b)] += w[b] * (p * u[b]);
            }
        }
    }
    let mut x = CMatrix::zeros(n, n);
    for a in 0..n {
        for b in 0..n {
            x[(a, b)] = if a == b {
                alpha[a] * gamma[(a, a)] - gain[a]
            } else {
                (alpha[a] - pure[(a, b)]) * gamma[(a, b)]
            };
        }
    }
    &x + x.adjoint()
}

fn fast_with(gamma: &CMatrix, ctx: &GeneratorContext, blocking: Blocking) -> Result<CMatrix> {
    ctx.check_dim(gamma)?;
    let input = ctx.dissipator_input(gamma);
    let eta = ctx.hole(&input, blocking);
    let d = dissipator_fast(&input, &eta, ctx);
    Ok(assemble(gamma, ctx, d))
}

/// Same contract as [`rhs_reference`], O(N_sites · N²).
pub fn rhs_fast(gamma: &CMatrix, ctx: &GeneratorContext) -> Result<CMatrix> {
    fast_with(gamma, ctx, ctx.blocking)
}

/// The generator with every η replaced by δ, independent of the context's
/// blocking flag.
pub fn rhs_unblocked(gamma: &CMatrix, ctx: &GeneratorContext) -> Result<CMatrix> {
    fast_with(gamma, ctx, Blocking::Unblocked)
}

/// Diagonal kinetics with rates `k[(i, j)]` for j → i:
/// dn_i/dt = Σ_j [K_ij (1 − n_i) n_j − K_ji (1 − n_j) n_i].
/// With [`Blocking::Unblocked`] the (1 − n) factors are dropped.
pub fn pauli_kinetics_rhs(n: &[f64], k: &DMatrix<f64>, blocking: Blocking) -> Result<DVector<f64>> {
    let dim = n.len();
    if k.nrows() != dim || k.ncols() != dim {
        return Err(Error::DimensionMismatch {
            expected: dim,
            found: k.nrows(),
        });
    }
    if let Some(bad) = k.iter().find(|&&x| !(x >= 0.0)) {
        return Err(Error::InvalidArgument(format!("negative transition rate {bad}")));
    }
    let block = |x: f64| match blocking {
        Blocking::Blocked => 1.0 - x,
        Blocking::Unblocked => 1.0,
    };
    Ok(DVector::from_fn(dim, |i, _| {
        (0..dim)
            .map(|j| k[(i, j)] * block(n[i]) * n[j] - k[(j, i)] * block(n[j]) * n[i])
            .sum()
    }))
}

/// Closed form of ⟨[[a†_a a_b, a†_c a_d], a†_e a_f]⟩ in terms of γ and η.
pub fn double_commutator_expectation(idx: [usize; 6], gamma: &CMatrix) -> C64 {
    let [a, b, c, d, e, f] = idx;
    let eta = hole_matrix(gamma);
    let delta = |x: usize, y: usize| if x == y { C64::new(1.0, 0.0) } else { C64::default() };
    delta(c, b) * (gamma[(a, f)] * eta[(e, d)] - eta[(a, f)] * gamma[(e, d)])
        + delta(a, d) * (gamma[(e, b)] * eta[(c, f)] - eta[(e, b)] * gamma[(c, f)])
}

/// Compare the exact Fock-space expectation of the double commutator
/// `[[a†_a a_b, a†_c a_d], a†_e a_f]` in state `rho` against the closed form
/// built from the 1-RDM of the same state. Returns `(exact, closed_form)`.
pub fn mk_identity_check(idx: [usize; 6], rho: &CMatrix, fock: &FockSpace) -> Result<(C64, C64)> {
    fock.validate_state(rho)?;
    if let Some(&bad) = idx.iter().find(|&&i| i >= fock.n_modes()) {
        return Err(Error::InvalidArgument(format!(
            "mode index {bad} out of range for {} modes",
            fock.n_modes()
        )));
    }
    let [a, b, c, d, e, f] = idx;
    let x = fock.hopping(a, b);
    let y = fock.hopping(c, d);
    let z = fock.hopping(e, f);
    let inner = x * y - y * x;
    let outer = &inner * z - z * &inner;
    let exact = trace_product(rho, &outer);
    let gamma = fock.one_rdm(rho);
    Ok((exact, double_commutator_expectation(idx, &gamma)))
}
