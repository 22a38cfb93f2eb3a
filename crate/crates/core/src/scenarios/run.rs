// SPDX-License-Identifier: Apache-2.0

use crate::density::CMatrix;
use crate::error::Result;
use crate::generator::{Blocking, GeneratorContext};
use crate::integrator::{propagate, PropagateOptions, Trajectory};
use crate::model::{beta, chemical_potential, fd_occupations};
use crate::observables::{effective_rate_ratio, mean_long_range_coherence, site_density, ObservableSeries};

use super::output::{Snapshot, Summary};
use super::{initial_condition, Scenario};

/// Fraction of the samples, counted from the end, used for late-time
/// oscillation amplitudes.
const LATE_FRACTION: f64 = 0.1;
/// P_g band defining the relaxation window of the effective rate.
pub(crate) const RATE_WINDOW: (f64, f64) = (0.05, 0.95);

/// Everything produced by one run, before serialization.
#[derive(Debug, Clone)]
pub struct RunResult {
    pub scenario: Scenario,
    pub context: GeneratorContext,
    pub mu: f64,
    pub trajectory: Trajectory,
    pub series: ObservableSeries,
    pub snapshots: Vec<Snapshot>,
    pub summary: Summary,
}

pub fn run(scenario: &Scenario) -> Result<RunResult> {
    scenario.validate()?;
    let ctx = scenario.context()?;
    let gamma0 = initial_condition(&scenario.initial, &scenario.chain, &ctx)?;
    let temperature = scenario.bath.temperature;
    let energies = ctx.eigen().energies().clone();
    let ne = scenario.chain.n_electrons;
    let partially_filled = ne > 0 && ne < scenario.chain.n_sites;
    let mu = if partially_filled {
        chemical_potential(&energies, ne, temperature)?
    } else if ne == 0 {
        f64::NEG_INFINITY
    } else {
        f64::INFINITY
    };

    let options = PropagateOptions {
        t_max: scenario.run.t_max,
        output_interval: scenario.run.output_interval,
        stationarity_tol: scenario
            .run
            .stop_at_equilibrium
            .then_some(scenario.run.stationarity_tol),
        snapshot_times: scenario.run.snapshot_times.clone(),
        trace_tol: scenario.run.trace_tol,
        bound_tol: scenario.run.bound_tol,
    };
    log::info!("running '{}' to t = {:e}", scenario.name, options.t_max);
    let traj = propagate(&gamma0, &ctx, &scenario.integrator, &options, &mut |_, _| {})?;
    log::info!(
        "'{}' stopped at t = {:e} after {} steps (equilibrated: {})",
        scenario.name,
        traj.final_time,
        traj.steps.accepted,
        traj.equilibrated
    );

    let series = ObservableSeries::from_trajectory(&traj, ctx.eigen(), mu);
    let mut snapshots = vec![Snapshot::new("initial", 0.0, traj.states[0].clone(), &ctx)];
    for (i, (t, g)) in traj.snapshots.iter().enumerate() {
        snapshots.push(Snapshot::new(&format!("requested_{i}"), *t, g.clone(), &ctx));
    }
    snapshots.push(Snapshot::new(
        "final",
        traj.final_time,
        traj.final_state().clone(),
        &ctx,
    ));

    let final_pops: Vec<f64> = traj.final_state().diagonal().iter().map(|z| z.re).collect();
    let fd_targets: Vec<f64> = if partially_filled {
        fd_occupations(&energies, mu, temperature).iter().copied().collect()
    } else {
        vec![ne as f64 / scenario.chain.n_sites as f64; scenario.chain.n_sites]
    };
    let max_fd_residual = max_abs_diff(&final_pops, &fd_targets);

    let (canonical_targets, max_canonical_relative_residual) = match ctx.blocking() {
        Blocking::Unblocked => {
            let c = canonical_populations(energies.as_slice(), ne as f64, temperature);
            let rel = final_pops
                .iter()
                .zip(&c)
                .map(|(n, c)| ((n - c) / c).abs())
                .fold(0.0, f64::max);
            (Some(c), Some(rel))
        }
        Blocking::Blocked => (None, None),
    };

    let sep = scenario.run.coherence_min_separation;
    let coherence = |g: &CMatrix| mean_long_range_coherence(&site_density(g, ctx.eigen()), sep);
    let pg = series.ground_state_probabilities();
    let times = series.times();
    let rate_ratio = effective_rate_ratio(&times, &pg, RATE_WINDOW.0, RATE_WINDOW.1).ok();

    let late = late_window(&series);
    let site_amp = oscillation_amplitude(late, |s| &s.site_populations);
    let eigen_amp = oscillation_amplitude(late, |s| &s.populations);
    let final_site: Vec<f64> = series
        .samples
        .last()
        .map(|s| s.site_populations.clone())
        .unwrap_or_default();
    let max_site_deviation_from_mean = {
        let mean = ne as f64 / scenario.chain.n_sites as f64;
        final_site.iter().map(|x| (x - mean).abs()).fold(0.0, f64::max)
    };

    let inv = traj.invariants;
    let summary = Summary {
        scenario: scenario.name.clone(),
        equilibrium_model: match ctx.blocking() {
            Blocking::Blocked => "fermi-dirac".into(),
            Blocking::Unblocked => "canonical".into(),
        },
        equilibrated: traj.equilibrated,
        final_time: traj.final_time,
        steps_accepted: traj.steps.accepted,
        steps_rejected: traj.steps.rejected,
        rate_scale: traj.rate_scale,
        max_trace_drift: inv.max_trace_drift,
        max_hermiticity_residual: inv.max_hermiticity_residual,
        min_occupation_eigenvalue: inv.min_occupation,
        max_occupation_eigenvalue: inv.max_occupation,
        chemical_potential: mu,
        beta: beta(temperature),
        final_populations: final_pops,
        fd_targets,
        max_fd_residual,
        canonical_targets,
        max_canonical_relative_residual,
        final_ground_state_probability: pg.last().copied().unwrap_or(f64::NAN),
        effective_rate_ratio: rate_ratio,
        final_site_populations: final_site,
        max_site_deviation_from_mean,
        late_site_oscillation_amplitude: site_amp,
        late_population_oscillation_amplitude: eigen_amp,
        long_range_coherence_initial: coherence(&traj.states[0]),
        long_range_coherence_final: coherence(traj.final_state()),
        coherence_min_separation: sep,
    };

    Ok(RunResult {
        scenario: scenario.clone(),
        context: ctx,
        mu,
        trajectory: traj,
        series,
        snapshots,
        summary,
    })
}

/// n_i = N_e e^{−βε_i} / Σ_j e^{−βε_j}, the fixed point of the unblocked
/// kinetics at fixed electron count.
pub fn canonical_populations(energies: &[f64], electron_count: f64, temperature: f64) -> Vec<f64> {
    let b = beta(temperature);
    let e0 = energies.iter().copied().fold(f64::INFINITY, f64::min);
    let w: Vec<f64> = energies.iter().map(|e| (-b * (e - e0)).exp()).collect();
    let z: f64 = w.iter().sum();
    w.iter().map(|x| electron_count * x / z).collect()
}

fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

fn late_window(series: &ObservableSeries) -> &[crate::observables::Sample] {
    let n = series.samples.len();
    let take = ((n as f64 * LATE_FRACTION).ceil() as usize).clamp(1, n.max(1));
    &series.samples[n.saturating_sub(take)..]
}

/// Largest half peak-to-peak excursion of any component over the window.
fn oscillation_amplitude<F>(window: &[crate::observables::Sample], field: F) -> f64
where
    F: Fn(&crate::observables::Sample) -> &Vec<f64>,
{
    let Some(first) = window.first() else {
        return 0.0;
    };
    (0..field(first).len())
        .map(|i| {
            let (lo, hi) = window
                .iter()
                .map(|s| field(s)[i])
                .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), x| (lo.min(x), hi.max(x)));
            0.5 * (hi - lo)
        })
        .fold(0.0, f64::max)
}
