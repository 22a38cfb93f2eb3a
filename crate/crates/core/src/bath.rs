// SPDX-License-Identifier: Apache-2.0

//! Bosonic baths: Drude-Lorentz spectral densities and the one-sided rate
//! function Γ(ω), which obeys Γ(ω) = e^{βω} Γ(−ω).

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{beta, EigenSystem, K_BOLTZMANN};

/// One Lorentzian peak of the spectral density (all atomic units).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DrudeLorentzPeak {
    pub width: f64,
    pub amplitude: f64,
    pub center: f64,
}

impl DrudeLorentzPeak {
    pub const fn new(width: f64, amplitude: f64, center: f64) -> Self {
        DrudeLorentzPeak {
            width,
            amplitude,
            center,
        }
    }

    fn validate(&self) -> Result<()> {
        if !(self.width > 0.0) || !(self.amplitude >= 0.0) || !(self.center >= 0.0) {
            return Err(Error::InvalidBath(format!(
                "peak needs width > 0, amplitude >= 0, center >= 0: {self:?}"
            )));
        }
        Ok(())
    }

    fn eval(&self, omega: f64) -> f64 {
        let d = omega - self.center;
        self.amplitude * self.width * omega / (d * d + self.width * self.width)
    }

    /// dJ/dω at ω = 0⁺.
    fn slope_at_zero(&self) -> f64 {
        self.amplitude * self.width / (self.center * self.center + self.width * self.width)
    }
}

/// The strong high-frequency bath used for every built-in scenario:
/// four peaks given as (width, amplitude, center).
pub const DEFAULT_PEAKS: [DrudeLorentzPeak; 4] = [
    DrudeLorentzPeak::new(0.0001, 0.00001, 0.0001),
    DrudeLorentzPeak::new(0.001, 0.0017, 0.0017),
    DrudeLorentzPeak::new(0.013, 0.023, 0.027),
    DrudeLorentzPeak::new(0.01, 0.017, 0.017),
];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BathSpec {
    /// Kelvin.
    pub temperature: f64,
    /// Spectral-density peaks attached to each site.
    pub peaks_per_site: Vec<Vec<DrudeLorentzPeak>>,
}

impl BathSpec {
    /// The same peaks on every one of `n_sites` sites.
    pub fn uniform(temperature: f64, n_sites: usize, peaks: &[DrudeLorentzPeak]) -> Self {
        BathSpec {
            temperature,
            peaks_per_site: vec![peaks.to_vec(); n_sites],
        }
    }

    pub fn default_for(temperature: f64, n_sites: usize) -> Self {
        Self::uniform(temperature, n_sites, &DEFAULT_PEAKS)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.temperature > 0.0) || !self.temperature.is_finite() {
            return Err(Error::InvalidBath(format!(
                "temperature must be positive, got {}",
                self.temperature
            )));
        }
        for p in self.peaks_per_site.iter().flatten() {
            p.validate()?;
        }
        Ok(())
    }
}

/// J(ω) = Σ_k A_k γ_k ω / ((ω − ω0_k)² + γ_k²), defined for ω ≥ 0.
pub fn spectral_density(omega: f64, peaks: &[DrudeLorentzPeak]) -> Result<f64> {
    if !(omega >= 0.0) {
        return Err(Error::InvalidArgument(format!(
            "spectral density takes |ω|, got {omega}"
        )));
    }
    Ok(peaks.iter().map(|p| p.eval(omega)).sum())
}

/// Bose occupation 1/(e^{βω} − 1).
pub fn bose_occupation(omega: f64, temperature: f64) -> Result<f64> {
    if omega == 0.0 || !omega.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "Bose occupation diverges at ω = {omega}"
        )));
    }
    if !(temperature > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "temperature must be positive, got {temperature}"
        )));
    }
    let x = beta(temperature) * omega;
    if x > 0.0 {
        Ok((-x).exp() / -(-x).exp_m1())
    } else {
        Ok(1.0 / x.exp_m1())
    }
}

/// Real part of the one-sided bath correlation transform at frequency ω.
///
/// Positive ω is emission into the bath, negative ω absorption. The ω = 0
/// value is the analytic limit k_B T · J'(0⁺).
pub fn gamma_rate(omega: f64, temperature: f64, peaks: &[DrudeLorentzPeak]) -> Result<f64> {
    if !(temperature > 0.0) || !temperature.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "temperature must be positive, got {temperature}"
        )));
    }
    if omega == 0.0 {
        let slope: f64 = peaks.iter().map(DrudeLorentzPeak::slope_at_zero).sum();
        return Ok(K_BOLTZMANN * temperature * slope);
    }
    let j = spectral_density(omega.abs(), peaks)?;
    let n = bose_occupation(omega.abs(), temperature)?;
    Ok(if omega > 0.0 { j * (n + 1.0) } else { j * n })
}

/// Γ_ν(ω_ij) for every site and ordered eigenstate pair.
#[derive(Debug, Clone, PartialEq)]
pub struct RateTable {
    temperature: f64,
    rates: Vec<DMatrix<f64>>,
}

impl RateTable {
    pub fn n_sites(&self) -> usize {
        self.rates.len()
    }

    pub fn temperature(&self) -> f64 {
        self.temperature
    }

    pub fn site(&self, nu: usize) -> &DMatrix<f64> {
        &self.rates[nu]
    }

    pub fn get(&self, nu: usize, i: usize, j: usize) -> f64 {
        self.rates[nu][(i, j)]
    }

    pub fn iter(&self) -> impl Iterator<Item = &DMatrix<f64>> {
        self.rates.iter()
    }

    /// Worst relative violation of Γ_ji = e^{−βω_ij} Γ_ij over pairs with
    /// ω_ij ≥ 0. Pairs where both sides underflow below 1e-300 are skipped.
    pub fn detailed_balance_residual(&self, es: &EigenSystem) -> f64 {
        let beta = beta(self.temperature);
        let n = es.dim();
        let mut worst = 0.0f64;
        for g in &self.rates {
            for i in 0..n {
                for j in 0..n {
                    let w = es.frequency(i, j);
                    if w < 0.0 {
                        continue;
                    }
                    let predicted = (-beta * w).exp() * g[(i, j)];
                    let actual = g[(j, i)];
                    let scale = predicted.abs().max(actual.abs());
                    if scale < 1e-300 {
                        continue;
                    }
                    worst = worst.max((predicted - actual).abs() / scale);
                }
            }
        }
        worst
    }
}

pub fn build_rate_table(es: &EigenSystem, bath: &BathSpec) -> Result<RateTable> {
    bath.validate()?;
    if bath.peaks_per_site.len() != es.dim() {
        return Err(Error::DimensionMismatch {
            expected: es.dim(),
            found: bath.peaks_per_site.len(),
        });
    }
    let n = es.dim();
    let mut rates: Vec<DMatrix<f64>> = Vec::with_capacity(n);
    for (nu, peaks) in bath.peaks_per_site.iter().enumerate() {
        // Sites sharing a peak list share a table.
        if let Some(prev) = (0..nu).find(|&m| bath.peaks_per_site[m] == *peaks) {
            rates.push(rates[prev].clone());
            continue;
        }
        let mut g = DMatrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                g[(i, j)] = gamma_rate(es.frequency(i, j), bath.temperature, peaks)?;
            }
        }
        rates.push(g);
    }
    Ok(RateTable {
        temperature: bath.temperature,
        rates,
    })
}
