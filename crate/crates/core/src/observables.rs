// SPDX-License-Identifier: Apache-2.0

//! Quantities derived from γ: site-basis density, ground-state probability,
//! effective relaxation rate and real-space coherence maps.

use nalgebra::{DMatrix, DVector};

use crate::density::{hermiticity_residual, CMatrix, C64};
use crate::error::{Error, Result};
use crate::integrator::Trajectory;
use crate::model::EigenSystem;

const LOG_FLOOR: f64 = 1e-300;

/// γ_site = U γ Uᵀ.
pub fn site_density(gamma: &CMatrix, es: &EigenSystem) -> CMatrix {
    let u = es.orbitals().map(|x| C64::new(x, 0.0));
    &u * gamma * u.transpose()
}

/// Inverse of [`site_density`]: Uᵀ γ_site U.
pub fn eigen_density(gamma_site: &CMatrix, es: &EigenSystem) -> CMatrix {
    let u = es.orbitals().map(|x| C64::new(x, 0.0));
    u.transpose() * gamma_site * &u
}

/// Θ(ε_i − μ): 1 for levels above μ (empty at T = 0), else 0.
fn above(energy: f64, mu: f64) -> f64 {
    if energy > mu {
        1.0
    } else {
        0.0
    }
}

/// The zero-temperature filling is ambiguous when a level sits exactly at μ.
pub fn level_at_chemical_potential(energies: &DVector<f64>, mu: f64) -> bool {
    energies.iter().any(|&e| e == mu)
}

/// P_g = Π_i (1 − |n_i − (1 − Θ(ε_i − μ))|) with n_i = Re γ_ii clipped to [0, 1].
///
/// Equivalently each occupied level contributes n_i and each empty level
/// 1 − n_i.
pub fn ground_state_probability(gamma: &CMatrix, energies: &DVector<f64>, mu: f64) -> f64 {
    if level_at_chemical_potential(energies, mu) {
        log::warn!("a level lies exactly at μ = {mu}; treating it as occupied");
    }
    gamma
        .diagonal()
        .iter()
        .zip(energies.iter())
        .map(|(g, &e)| {
            let n = g.re.clamp(0.0, 1.0);
            let filled = 1.0 - above(e, mu);
            1.0 - (n - filled).abs()
        })
        .product()
}

/// r(t) = (dP_g/dt) / (1 − P_g) with centred differences on a possibly
/// non-uniform grid (one-sided at the ends).
pub fn effective_rate(times: &[f64], pg: &[f64]) -> Result<Vec<f64>> {
    if times.len() != pg.len() {
        return Err(Error::DimensionMismatch {
            expected: times.len(),
            found: pg.len(),
        });
    }
    if times.len() < 3 {
        return Err(Error::InvalidArgument("need at least three samples".into()));
    }
    if pg.iter().all(|&p| (1.0 - p).abs() < 1e-14) {
        return Err(Error::InvalidArgument(
            "P_g is 1 over the whole window; rate undefined".into(),
        ));
    }
    let n = times.len();
    let deriv = |i: usize| -> f64 {
        let (l, r) = match i {
            0 => (0, 1),
            i if i == n - 1 => (n - 2, n - 1),
            i => (i - 1, i + 1),
        };
        (pg[r] - pg[l]) / (times[r] - times[l])
    };
    Ok((0..n)
        .map(|i| {
            let d = deriv(i);
            if d == 0.0 {
                0.0
            } else {
                d / (1.0 - pg[i])
            }
        })
        .collect())
}

/// max r / min r over the samples with `lo ≤ P_g ≤ hi`, where r is the
/// [`effective_rate`] of the full series.
pub fn effective_rate_ratio(times: &[f64], pg: &[f64], lo: f64, hi: f64) -> Result<f64> {
    let r = effective_rate(times, pg)?;
    let window: Vec<f64> = r
        .iter()
        .zip(pg)
        .filter(|(_, &p)| p >= lo && p <= hi)
        .map(|(&r, _)| r)
        .collect();
    if window.len() < 2 {
        return Err(Error::InvalidArgument(format!(
            "fewer than two samples with P_g in [{lo}, {hi}]"
        )));
    }
    let min = window.iter().copied().fold(f64::INFINITY, f64::min);
    let max = window.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if !(min > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "effective rate is not positive on the window (min {min:e})"
        )));
    }
    Ok(max / min)
}

/// −1/ln(|γ_site(x, x′)| + 1e-300) off the diagonal; the diagonal holds
/// |γ_site(x, x)| unchanged.
pub fn localization_map(gamma_site: &CMatrix) -> DMatrix<f64> {
    DMatrix::from_fn(gamma_site.nrows(), gamma_site.ncols(), |x, y| {
        let m = gamma_site[(x, y)].norm();
        if x == y {
            m
        } else {
            -1.0 / (m + LOG_FLOOR).ln()
        }
    })
}

/// Mean |γ_site(x, x′)| over pairs with |x − x′| ≥ `min_separation`.
pub fn mean_long_range_coherence(gamma_site: &CMatrix, min_separation: usize) -> f64 {
    let n = gamma_site.nrows();
    let mut sum = 0.0;
    let mut count = 0usize;
    for x in 0..n {
        for y in 0..n {
            if x.abs_diff(y) >= min_separation {
                sum += gamma_site[(x, y)].norm();
                count += 1;
            }
        }
    }
    if count == 0 {
        0.0
    } else {
        sum / count as f64
    }
}

/// One row of the time-series table.
#[derive(Debug, Clone, PartialEq)]
pub struct Sample {
    pub time: f64,
    pub populations: Vec<f64>,
    pub site_populations: Vec<f64>,
    pub ground_state_probability: f64,
    pub trace: f64,
    pub hermiticity_residual: f64,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct ObservableSeries {
    pub samples: Vec<Sample>,
}

impl ObservableSeries {
    pub fn from_trajectory(traj: &Trajectory, es: &EigenSystem, mu: f64) -> Self {
        let samples = traj
            .times
            .iter()
            .zip(&traj.states)
            .map(|(&t, g)| sample(t, g, es, mu))
            .collect();
        ObservableSeries { samples }
    }

    pub fn times(&self) -> Vec<f64> {
        self.samples.iter().map(|s| s.time).collect()
    }

    pub fn ground_state_probabilities(&self) -> Vec<f64> {
        self.samples.iter().map(|s| s.ground_state_probability).collect()
    }
}

pub fn sample(time: f64, gamma: &CMatrix, es: &EigenSystem, mu: f64) -> Sample {
    let site = site_density(gamma, es);
    Sample {
        time,
        populations: gamma.diagonal().iter().map(|z| z.re).collect(),
        site_populations: site.diagonal().iter().map(|z| z.re).collect(),
        ground_state_probability: ground_state_probability(gamma, es.energies(), mu),
        trace: gamma.trace().re,
        hermiticity_residual: hermiticity_residual(gamma),
    }
}
