// SPDX-License-Identifier: Apache-2.0

//! Runge-Kutta-Fehlberg 4(5) integration.
//!
//! The solution is advanced with the fifth-order weights and the embedded
//! fourth-order solution supplies the error estimate.

use serde::{Deserialize, Serialize};

use crate::density::{hermitian_eigenvalues, hermiticity_residual, CMatrix, DensityMatrix, C64};
use crate::error::{Error, Result};
use crate::generator::{Blocking, Dephasing, GeneratorContext};

/// A state the integrator can propagate.
pub trait OdeState: Clone {
    /// `self += alpha * x`
    fn add_scaled(&mut self, alpha: f64, x: &Self);

    /// max_i |err_i| / (atol + rtol · max(|y0_i|, |y1_i|))
    fn error_norm(err: &Self, y0: &Self, y1: &Self, atol: f64, rtol: f64) -> f64;

    fn is_finite(&self) -> bool;
}

impl OdeState for f64 {
    fn add_scaled(&mut self, alpha: f64, x: &Self) {
        *self += alpha * x;
    }

    fn error_norm(err: &Self, y0: &Self, y1: &Self, atol: f64, rtol: f64) -> f64 {
        err.abs() / (atol + rtol * y0.abs().max(y1.abs()))
    }

    fn is_finite(&self) -> bool {
        f64::is_finite(*self)
    }
}

impl OdeState for C64 {
    fn add_scaled(&mut self, alpha: f64, x: &Self) {
        *self += x * alpha;
    }

    fn error_norm(err: &Self, y0: &Self, y1: &Self, atol: f64, rtol: f64) -> f64 {
        err.norm() / (atol + rtol * y0.norm().max(y1.norm()))
    }

    fn is_finite(&self) -> bool {
        self.re.is_finite() && self.im.is_finite()
    }
}

impl OdeState for CMatrix {
    fn add_scaled(&mut self, alpha: f64, x: &Self) {
        self.zip_apply(x, |s, v| *s += v * alpha);
    }

    fn error_norm(err: &Self, y0: &Self, y1: &Self, atol: f64, rtol: f64) -> f64 {
        err.iter()
            .zip(y0.iter().zip(y1.iter()))
            .map(|(e, (a, b))| C64::error_norm(e, a, b, atol, rtol))
            .fold(0.0, f64::max)
    }

    fn is_finite(&self) -> bool {
        self.iter().all(OdeState::is_finite)
    }
}

// Fehlberg tableau.
const C: [f64; 6] = [0.0, 1.0 / 4.0, 3.0 / 8.0, 12.0 / 13.0, 1.0, 1.0 / 2.0];
const A: [[f64; 5]; 6] = [
    [0.0, 0.0, 0.0, 0.0, 0.0],
    [1.0 / 4.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 32.0, 9.0 / 32.0, 0.0, 0.0, 0.0],
    [1932.0 / 2197.0, -7200.0 / 2197.0, 7296.0 / 2197.0, 0.0, 0.0],
    [439.0 / 216.0, -8.0, 3680.0 / 513.0, -845.0 / 4104.0, 0.0],
    [-8.0 / 27.0, 2.0, -3544.0 / 2565.0, 1859.0 / 4104.0, -11.0 / 40.0],
];
const B5: [f64; 6] = [
    16.0 / 135.0,
    0.0,
    6656.0 / 12825.0,
    28561.0 / 56430.0,
    -9.0 / 50.0,
    2.0 / 55.0,
];
const B4: [f64; 6] = [25.0 / 216.0, 0.0, 1408.0 / 2565.0, 2197.0 / 4104.0, -1.0 / 5.0, 0.0];

fn step_from_k1<S, F>(y: &S, t: f64, h: f64, k1: &S, rhs: &mut F) -> Result<(S, S)>
where
    S: OdeState,
    F: FnMut(f64, &S) -> Result<S>,
{
    let mut k: Vec<S> = Vec::with_capacity(6);
    k.push(k1.clone());
    for stage in 1..6 {
        let mut ys = y.clone();
        for (j, kj) in k.iter().enumerate() {
            let a = A[stage][j];
            if a != 0.0 {
                ys.add_scaled(h * a, kj);
            }
        }
        k.push(rhs(t + C[stage] * h, &ys)?);
    }
    let mut y5 = y.clone();
    let mut err = y.clone();
    err.add_scaled(-1.0, y);
    for (i, ki) in k.iter().enumerate() {
        if B5[i] != 0.0 {
            y5.add_scaled(h * B5[i], ki);
        }
        let d = B5[i] - B4[i];
        if d != 0.0 {
            err.add_scaled(h * d, ki);
        }
    }
    if !y5.is_finite() || !err.is_finite() {
        return Err(Error::NonFinite { t: t + h });
    }
    Ok((y5, err))
}

/// One RKF45 step of size `h` (six right-hand-side evaluations). Returns the
/// fifth-order state and the difference between the fifth- and fourth-order
/// solutions.
pub fn step<S, F>(y: &S, t: f64, h: f64, mut rhs: F) -> Result<(S, S)>
where
    S: OdeState,
    F: FnMut(f64, &S) -> Result<S>,
{
    let k1 = rhs(t, y)?;
    if !k1.is_finite() {
        return Err(Error::NonFinite { t });
    }
    step_from_k1(y, t, h, &k1, &mut rhs)
}

/// `n_steps` equal steps from `t0` to `t1`.
pub fn integrate_fixed<S, F>(y0: &S, t0: f64, t1: f64, n_steps: usize, mut rhs: F) -> Result<S>
where
    S: OdeState,
    F: FnMut(f64, &S) -> Result<S>,
{
    let h = (t1 - t0) / n_steps as f64;
    let mut y = y0.clone();
    for i in 0..n_steps {
        let t = t0 + i as f64 * h;
        let k1 = rhs(t, &y)?;
        y = step_from_k1(&y, t, h, &k1, &mut rhs)?.0;
    }
    Ok(y)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct IntegratorConfig {
    pub rtol: f64,
    pub atol: f64,
    pub initial_step: f64,
    pub min_step: f64,
    pub max_step: f64,
    pub safety: f64,
    pub max_steps: usize,
    /// Replace γ by (γ + γ†)/2 after every accepted step.
    pub rehermitize: bool,
}

impl Default for IntegratorConfig {
    fn default() -> Self {
        IntegratorConfig {
            rtol: 1e-8,
            atol: 1e-10,
            initial_step: 1.0,
            min_step: 1e-10,
            max_step: 1e4,
            safety: 0.9,
            max_steps: 5_000_000,
            rehermitize: false,
        }
    }
}

impl IntegratorConfig {
    pub fn validate(&self) -> Result<()> {
        let ok = self.rtol > 0.0
            && self.atol > 0.0
            && self.initial_step > 0.0
            && self.min_step > 0.0
            && self.min_step < self.max_step
            && self.safety > 0.0
            && self.safety <= 1.0
            && self.max_steps > 0;
        if ok {
            Ok(())
        } else {
            Err(Error::Config(format!("invalid integrator settings: {self:?}")))
        }
    }

    fn next_step(&self, h: f64, err: f64) -> f64 {
        let factor = if err == 0.0 {
            5.0
        } else {
            (self.safety * err.powf(-0.2)).clamp(0.2, 5.0)
        };
        (h * factor).clamp(self.min_step, self.max_step)
    }
}

/// Adaptive integration of a generic state from `t0` to `t1`.
pub fn integrate_adaptive<S, F>(y0: &S, t0: f64, t1: f64, config: &IntegratorConfig, mut rhs: F) -> Result<S>
where
    S: OdeState,
    F: FnMut(f64, &S) -> Result<S>,
{
    config.validate()?;
    let mut y = y0.clone();
    let mut t = t0;
    let mut h = config.initial_step.min(config.max_step);
    let mut steps = 0usize;
    while t < t1 {
        let k1 = rhs(t, &y)?;
        loop {
            steps += 1;
            if steps > config.max_steps {
                return Err(Error::MaxStepsExceeded {
                    max_steps: config.max_steps,
                    t,
                });
            }
            let last = t + h >= t1;
            let h_try = if last { t1 - t } else { h };
            let (y_new, err) = step_from_k1(&y, t, h_try, &k1, &mut rhs)?;
            let e = S::error_norm(&err, &y, &y_new, config.atol, config.rtol);
            if e <= 1.0 {
                t = if last { t1 } else { t + h_try };
                y = y_new;
                h = config.next_step(h_try, e);
                break;
            }
            if h_try <= config.min_step {
                return Err(Error::StepUnderflow { t, h: h_try });
            }
            h = config.next_step(h_try, e).min(h_try * 0.9);
        }
    }
    Ok(y)
}

/// Controls for [`propagate`] beyond the step-size settings.
#[derive(Debug, Clone, PartialEq)]
pub struct PropagateOptions {
    pub t_max: f64,
    /// Spacing of recorded samples (au time). Steps are shortened to land on
    /// each sample time.
    pub output_interval: f64,
    /// Stop once max |dγ/dt| < `stationarity_tol` × the largest transfer rate.
    /// `None` always runs to `t_max`.
    pub stationarity_tol: Option<f64>,
    /// Abort when |Tr γ − Tr γ₀| exceeds this.
    pub trace_tol: f64,
    /// Abort when an occupation eigenvalue leaves [−tol, 1 + tol].
    /// Only applied with blocking on.
    pub bound_tol: f64,
    /// Additional times at which the full state is kept in
    /// [`Trajectory::snapshots`]. Steps land on them exactly.
    pub snapshot_times: Vec<f64>,
}

impl Default for PropagateOptions {
    fn default() -> Self {
        PropagateOptions {
            t_max: 1e6,
            output_interval: 100.0,
            stationarity_tol: Some(1e-12),
            trace_tol: 1e-6,
            bound_tol: 1e-6,
            snapshot_times: Vec::new(),
        }
    }
}

/// Running extremes of invariant diagnostics over all accepted steps.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct InvariantStats {
    pub max_trace_drift: f64,
    pub max_hermiticity_residual: f64,
    pub min_occupation: f64,
    pub max_occupation: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct StepCounts {
    pub accepted: usize,
    pub rejected: usize,
}

#[derive(Debug, Clone)]
pub struct Trajectory {
    /// Sample times, strictly increasing, starting at 0.
    pub times: Vec<f64>,
    pub states: Vec<CMatrix>,
    /// States at the requested snapshot times reached before termination.
    pub snapshots: Vec<(f64, CMatrix)>,
    pub equilibrated: bool,
    pub final_time: f64,
    pub steps: StepCounts,
    pub invariants: InvariantStats,
    /// Largest transfer rate of the generator, the stationarity yardstick.
    pub rate_scale: f64,
}

impl Trajectory {
    pub fn final_state(&self) -> &CMatrix {
        self.states.last().expect("trajectory has at least the initial sample")
    }
}

fn max_abs(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Integrate the generator from `gamma0`, recording a sample every
/// `output_interval` and at termination. `observer` is called for every
/// recorded sample.
pub fn propagate(
    gamma0: &DensityMatrix,
    ctx: &GeneratorContext,
    config: &IntegratorConfig,
    options: &PropagateOptions,
    observer: &mut dyn FnMut(f64, &CMatrix),
) -> Result<Trajectory> {
    config.validate()?;
    if !(options.t_max > 0.0) || !(options.output_interval > 0.0) {
        return Err(Error::Config("t_max and output_interval must be positive".into()));
    }
    let mut snapshot_times: Vec<f64> = options.snapshot_times.clone();
    if snapshot_times.iter().any(|t| !(*t > 0.0)) {
        return Err(Error::Config("snapshot times must be positive".into()));
    }
    snapshot_times.sort_by(f64::total_cmp);
    snapshot_times.dedup();
    let mut snapshot_times = snapshot_times.into_iter().filter(|&t| t <= options.t_max).peekable();
    let mut y = gamma0.matrix().clone();
    let trace0 = y.trace().re;
    let check_bounds = ctx.blocking() == Blocking::Blocked && ctx.dephasing() == Dephasing::Full;
    let rate_scale = ctx.rate_scale();
    let mut rhs = |_t: f64, g: &CMatrix| ctx.rhs(g);

    let ev0 = hermitian_eigenvalues(&y);
    let mut traj = Trajectory {
        times: vec![0.0],
        states: vec![y.clone()],
        snapshots: Vec::new(),
        equilibrated: false,
        final_time: 0.0,
        steps: StepCounts::default(),
        invariants: InvariantStats {
            max_trace_drift: 0.0,
            max_hermiticity_residual: hermiticity_residual(&y),
            min_occupation: ev0.min(),
            max_occupation: ev0.max(),
        },
        rate_scale,
    };
    observer(0.0, &y);

    let mut t = 0.0;
    let mut h = config.initial_step.min(config.max_step);
    let mut sample_index = 1usize;
    loop {
        let k1 = rhs(t, &y)?;
        if !k1.is_finite() {
            return Err(Error::NonFinite { t });
        }
        if let Some(tol) = options.stationarity_tol {
            if max_abs(&k1) < tol * rate_scale {
                traj.equilibrated = true;
                break;
            }
        }
        if t >= options.t_max {
            break;
        }
        let next_sample = (sample_index as f64 * options.output_interval).min(options.t_max);
        let target = snapshot_times.peek().map_or(next_sample, |&s| s.min(next_sample));
        loop {
            if traj.steps.accepted + traj.steps.rejected >= config.max_steps {
                return Err(Error::MaxStepsExceeded {
                    max_steps: config.max_steps,
                    t,
                });
            }
            let lands = t + h >= target;
            let h_try = if lands { target - t } else { h };
            let (y_new, err) = step_from_k1(&y, t, h_try, &k1, &mut rhs)?;
            let e = CMatrix::error_norm(&err, &y, &y_new, config.atol, config.rtol);
            if e <= 1.0 {
                traj.steps.accepted += 1;
                t = if lands { target } else { t + h_try };
                y = y_new;
                if config.rehermitize {
                    y = (&y + y.adjoint()) * C64::new(0.5, 0.0);
                }
                // Only grow from a full step; a shortened landing step says
                // nothing about the admissible size.
                if !lands || h_try >= h {
                    h = config.next_step(h_try, e);
                }
                break;
            }
            traj.steps.rejected += 1;
            if h_try <= config.min_step {
                return Err(Error::StepUnderflow { t, h: h_try });
            }
            h = config.next_step(h_try, e).min(h_try * 0.9);
        }

        let drift = (y.trace().re - trace0).abs();
        let inv = &mut traj.invariants;
        inv.max_trace_drift = inv.max_trace_drift.max(drift);
        inv.max_hermiticity_residual = inv.max_hermiticity_residual.max(hermiticity_residual(&y));
        if drift > options.trace_tol {
            return Err(Error::InvariantViolation {
                t,
                what: format!("trace drift {drift:e}"),
            });
        }
        let ev = hermitian_eigenvalues(&y);
        inv.min_occupation = inv.min_occupation.min(ev.min());
        inv.max_occupation = inv.max_occupation.max(ev.max());
        if check_bounds && (ev.min() < -options.bound_tol || ev.max() > 1.0 + options.bound_tol) {
            return Err(Error::InvariantViolation {
                t,
                what: format!("occupation eigenvalues [{:e}, {:e}] outside [0, 1]", ev.min(), ev.max()),
            });
        }

        if snapshot_times.peek() == Some(&t) {
            snapshot_times.next();
            traj.snapshots.push((t, y.clone()));
        }
        if t >= next_sample {
            traj.times.push(t);
            traj.states.push(y.clone());
            observer(t, &y);
            sample_index += 1;
        }
    }
    if t > *traj.times.last().unwrap() {
        traj.times.push(t);
        traj.states.push(y.clone());
        observer(t, &y);
    }
    traj.final_time = t;
    Ok(traj)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exponential_decay_to_one() {
        let cfg = IntegratorConfig {
            rtol: 1e-11,
            atol: 1e-13,
            ..IntegratorConfig::default()
        };
        let y = integrate_adaptive(&1.0f64, 0.0, 1.0, &cfg, |_, y| Ok(-y)).unwrap();
        let exact = (-1.0f64).exp();
        assert!((y - exact).abs() / exact < cfg.rtol, "{y}");
        assert!((y - 0.367879441).abs() < 1e-9);
    }

    #[test]
    fn rotation_conserves_modulus() {
        let w = 2.0 * std::f64::consts::PI;
        let cfg = IntegratorConfig {
            rtol: 1e-13,
            atol: 1e-15,
            initial_step: 1e-3,
            ..IntegratorConfig::default()
        };
        let y = integrate_adaptive(&C64::new(1.0, 0.0), 0.0, 1000.0, &cfg, |_, y| Ok(C64::new(0.0, w) * y)).unwrap();
        assert!((y.norm() - 1.0).abs() < 1e-9, "{}", y.norm());
    }

    #[test]
    fn single_step_matches_taylor() {
        let h = 0.01;
        let (y, err) = step(&1.0f64, 0.0, h, |_, y| Ok(-y)).unwrap();
        assert!((y - (-h).exp()).abs() < 1e-14);
        assert!(err.abs() < 1e-10);
    }

    #[test]
    fn non_finite_state_is_reported() {
        let r = step(&1.0f64, 0.0, 1.0, |_, _| Ok(f64::NAN));
        assert!(matches!(r, Err(Error::NonFinite { .. })));
    }

    #[test]
    fn config_validation() {
        let mut c = IntegratorConfig::default();
        assert!(c.validate().is_ok());
        c.min_step = c.max_step;
        assert!(c.validate().is_err());
        c = IntegratorConfig {
            rtol: 0.0,
            ..Default::default()
        };
        assert!(c.validate().is_err());
    }

    #[test]
    fn max_steps_is_enforced() {
        let cfg = IntegratorConfig {
            max_steps: 3,
            initial_step: 1e-3,
            max_step: 1e-3,
            min_step: 1e-6,
            ..Default::default()
        };
        let r = integrate_adaptive(&1.0f64, 0.0, 1.0, &cfg, |_, y| Ok(-y));
        assert!(matches!(r, Err(Error::MaxStepsExceeded { max_steps: 3, .. })));
    }
}
