// SPDX-License-Identifier: Apache-2.0

//! The one-electron reduced density matrix γ in the orbital eigenbasis.

use nalgebra::{Complex, DMatrix, DVector};

use crate::error::{Error, Result};

pub type C64 = Complex<f64>;
pub type CMatrix = DMatrix<C64>;

const HERMITIAN_TOL: f64 = 1e-10;
const TRACE_TOL: f64 = 1e-8;
const BOUND_TOL: f64 = 1e-8;

/// Largest elementwise |A_ij − conj(A_ji)|.
pub fn hermiticity_residual(m: &CMatrix) -> f64 {
    let n = m.nrows();
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in i..n {
            worst = worst.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    worst
}

/// Eigenvalues of a Hermitian matrix, ascending.
pub fn hermitian_eigenvalues(m: &CMatrix) -> DVector<f64> {
    let herm = (m + m.adjoint()) * C64::new(0.5, 0.0);
    let mut ev: Vec<f64> = herm.symmetric_eigenvalues().iter().copied().collect();
    ev.sort_by(f64::total_cmp);
    DVector::from_vec(ev)
}

/// Hermitian 1-RDM with a fixed expected electron count.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    gamma: CMatrix,
    electron_count: f64,
}

impl DensityMatrix {
    /// Validate and wrap a matrix. Hermiticity, trace and the occupation
    /// bounds `[0, 1]` are enforced.
    pub fn new(gamma: CMatrix) -> Result<Self> {
        if !gamma.is_square() {
            return Err(Error::DimensionMismatch {
                expected: gamma.nrows(),
                found: gamma.ncols(),
            });
        }
        let herm = hermiticity_residual(&gamma);
        if herm > HERMITIAN_TOL {
            return Err(Error::InvalidDensity(format!("not Hermitian (residual {herm:e})")));
        }
        let tr = gamma.trace();
        if tr.im.abs() > HERMITIAN_TOL {
            return Err(Error::InvalidDensity(format!("complex trace {tr}")));
        }
        let ev = hermitian_eigenvalues(&gamma);
        if ev.min() < -BOUND_TOL || ev.max() > 1.0 + BOUND_TOL {
            return Err(Error::InvalidDensity(format!(
                "occupation eigenvalues outside [0, 1]: [{:e}, {:e}]",
                ev.min(),
                ev.max()
            )));
        }
        Ok(DensityMatrix {
            electron_count: tr.re,
            gamma,
        })
    }

    /// As [`new`](Self::new), additionally requiring Tr γ = `electron_count`.
    pub fn with_electron_count(gamma: CMatrix, electron_count: f64) -> Result<Self> {
        let d = Self::new(gamma)?;
        if (d.electron_count - electron_count).abs() > TRACE_TOL {
            return Err(Error::InvalidDensity(format!(
                "trace {} does not match electron count {electron_count}",
                d.electron_count
            )));
        }
        Ok(DensityMatrix { electron_count, ..d })
    }

    /// Wrap a Hermitian matrix without enforcing the `[0, 1]` bounds. Used for
    /// the unblocked baseline, whose canonical fixed point overfills levels.
    pub fn new_unbounded(gamma: CMatrix) -> Result<Self> {
        let herm = hermiticity_residual(&gamma);
        if !gamma.is_square() || herm > HERMITIAN_TOL {
            return Err(Error::InvalidDensity(format!("not Hermitian (residual {herm:e})")));
        }
        Ok(DensityMatrix {
            electron_count: gamma.trace().re,
            gamma,
        })
    }

    pub fn from_populations(n: &[f64]) -> Self {
        let gamma = CMatrix::from_diagonal(&DVector::from_iterator(n.len(), n.iter().map(|&x| C64::new(x, 0.0))));
        DensityMatrix {
            electron_count: n.iter().sum(),
            gamma,
        }
    }

    pub fn dim(&self) -> usize {
        self.gamma.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.gamma
    }

    pub fn into_matrix(self) -> CMatrix {
        self.gamma
    }

    pub fn electron_count(&self) -> f64 {
        self.electron_count
    }

    pub fn trace(&self) -> C64 {
        self.gamma.trace()
    }

    /// η = I − γ.
    pub fn hole(&self) -> CMatrix {
        hole_matrix(&self.gamma)
    }

    /// Real parts of the diagonal.
    pub fn populations(&self) -> DVector<f64> {
        self.gamma.diagonal().map(|z| z.re)
    }

    /// Largest off-diagonal magnitude.
    pub fn coherence_norm(&self) -> f64 {
        let n = self.dim();
        let mut worst = 0.0f64;
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    worst = worst.max(self.gamma[(i, j)].norm());
                }
            }
        }
        worst
    }

    pub fn occupation_eigenvalues(&self) -> DVector<f64> {
        hermitian_eigenvalues(&self.gamma)
    }

    pub fn hermiticity_residual(&self) -> f64 {
        hermiticity_residual(&self.gamma)
    }
}

pub fn hole_matrix(gamma: &CMatrix) -> CMatrix {
    CMatrix::identity(gamma.nrows(), gamma.ncols()) - gamma
}
