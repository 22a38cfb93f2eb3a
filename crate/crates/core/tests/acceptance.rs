// SPDX-License-Identifier: Apache-2.0

//! Acceptance criteria. Prints one PASS/FAIL line per criterion.
//!
//! Criteria listed in `EXPECTED_FAILURES` are known to fail for reasons that
//! are intrinsic to the equation of motion; they still print FAIL, and the
//! target errors if any of them starts passing or any other criterion fails.

use std::process::ExitCode;
use std::time::Instant;

use pauli_redfield::bath::{build_rate_table, BathSpec};
use pauli_redfield::generator::{
    mk_identity_check, rhs_fast, rhs_reference, rhs_unblocked, Blocking, Dephasing, GeneratorContext,
};
use pauli_redfield::integrator::integrate_fixed;
use pauli_redfield::model::{beta, chemical_potential, fd_density, ChainSpec};
use pauli_redfield::oracles::{random_mixed_state, random_one_rdm, textbook_redfield_rhs, FockSpace};
use pauli_redfield::scenarios::{builtin, builtin_scenarios, run, RunResult, Scenario};
use pauli_redfield::CMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

// Tolerances.
const FD_EQUILIBRATION: f64 = 1e-3;
const TRACE_DRIFT: f64 = 1e-8;
const FD_STATIONARITY: f64 = 1e-13;
const DETAILED_BALANCE: f64 = 1e-12;
const DOUBLE_COMMUTATOR: f64 = 1e-10;
const DOUBLE_COMMUTATOR_SECONDS: f64 = 60.0;
const UNBLOCKED_TEXTBOOK: f64 = 1e-12;
const CANONICAL_RATIO: f64 = 1e-3;
const DIFFERS_FROM_FD: f64 = 1e-2;
const OCCUPATION_BOUND: f64 = 1e-8;
const RATE_RATIO: (f64, f64) = (3.0, 30.0);
const SITE_MEAN: f64 = 0.01;
const SITE_AMPLITUDE_DAMPED: f64 = 1e-3;
const SITE_AMPLITUDE_SUSTAINED: f64 = 0.05;
const FD_POPULATIONS_ONLY: f64 = 1e-3;
const ORDER_SLOPE: (f64, f64) = (4.6, 5.4);
const FAST_REFERENCE: f64 = 1e-12;

/// Occupation bounds: violated by the left-loaded chain, whose coherent
/// initial state is pushed above unit occupation by the masked gain term.
const EXPECTED_FAILURES: &[u32] = &[6];

struct Outcome {
    id: u32,
    title: &'static str,
    passed: bool,
    detail: String,
}

fn chain_ctx(n: usize, hopping: f64, temperature: f64, blocking: Blocking, dephasing: Dephasing) -> GeneratorContext {
    let chain = ChainSpec::new(n, 1.0, hopping, n / 2).unwrap();
    GeneratorContext::for_chain(&chain, &BathSpec::default_for(temperature, n), blocking, dephasing).unwrap()
}

fn max_abs(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

fn run_builtin(name: &str, edit: impl FnOnce(&mut Scenario)) -> RunResult {
    let mut s = builtin(name).unwrap();
    edit(&mut s);
    run(&s).unwrap_or_else(|e| panic!("{name}: {e}"))
}

struct Runs {
    fig1: RunResult,
    fig1_unblocked: RunResult,
    fig2: RunResult,
    fig3: RunResult,
    fig3_populations_only: RunResult,
    fig4: RunResult,
}

fn fd_equilibration(r: &Runs) -> Outcome {
    let s = &r.fig1.summary;
    Outcome {
        id: 1,
        title: "fig1 equilibrates to Fermi-Dirac",
        passed: s.equilibrated && s.max_fd_residual < FD_EQUILIBRATION && s.max_trace_drift < TRACE_DRIFT,
        detail: format!(
            "equilibrated={} at t={:e}, max|n-n_FD|={:.3e} (<{FD_EQUILIBRATION:e}), trace drift={:.3e} (<{TRACE_DRIFT:e})",
            s.equilibrated, s.final_time, s.max_fd_residual, s.max_trace_drift
        ),
    }
}

fn fd_stationarity() -> Outcome {
    let mut worst = 0.0f64;
    for n in [2usize, 8, 12] {
        for temp in [300.0, 500.0, 5000.0] {
            let ctx = chain_ctx(n, 0.005, temp, Blocking::Blocked, Dephasing::Full);
            let e = ctx.eigen().energies();
            let fd = fd_density(e, chemical_potential(e, n / 2, temp).unwrap(), temp);
            worst = worst.max(max_abs(&rhs_fast(fd.matrix(), &ctx).unwrap()) / ctx.rate_scale());
        }
    }
    Outcome {
        id: 2,
        title: "Fermi-Dirac density is stationary",
        passed: worst < FD_STATIONARITY,
        detail: format!(
            "max |dγ/dt| / rate scale = {worst:.3e} (<{FD_STATIONARITY:e}) over N∈{{2,8,12}}, T∈{{300,500,5000}} K"
        ),
    }
}

fn detailed_balance() -> Outcome {
    let mut worst = 0.0f64;
    let mut tables = 0;
    for s in builtin_scenarios() {
        let ctx = s.context().unwrap();
        worst = worst.max(
            build_rate_table(ctx.eigen(), &s.bath_spec().unwrap())
                .unwrap()
                .detailed_balance_residual(ctx.eigen()),
        );
        tables += 1;
    }
    for n in [2usize, 8, 12] {
        for temp in [300.0, 500.0, 5000.0] {
            let ctx = chain_ctx(n, 0.05, temp, Blocking::Blocked, Dephasing::Full);
            worst = worst.max(ctx.rates().detailed_balance_residual(ctx.eigen()));
            tables += 1;
        }
    }
    Outcome {
        id: 3,
        title: "bath rates obey detailed balance",
        passed: worst < DETAILED_BALANCE,
        detail: format!("max relative residual = {worst:.3e} (<{DETAILED_BALANCE:e}) over {tables} rate tables"),
    }
}

fn double_commutator() -> Outcome {
    const STATES: usize = 100;
    const TUPLES: usize = 200;
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut worst = 0.0f64;
    let mut checks = 0usize;
    for n in [2usize, 3, 4] {
        let fs = FockSpace::new(n).unwrap();
        for k in 0..STATES {
            let rho = random_mixed_state(n, 10_000 * n as u64 + k as u64).unwrap();
            for _ in 0..TUPLES {
                let idx: [usize; 6] = std::array::from_fn(|_| rng.random_range(0..n));
                let (lhs, rhs) = mk_identity_check(idx, &rho, &fs).unwrap();
                let d = (lhs - rhs).norm();
                worst = if d.is_nan() { f64::INFINITY } else { worst.max(d) };
                checks += 1;
            }
        }
    }
    let secs = start.elapsed().as_secs_f64();
    Outcome {
        id: 4,
        title: "closed-form double commutator matches Fock space",
        passed: worst < DOUBLE_COMMUTATOR && secs < DOUBLE_COMMUTATOR_SECONDS,
        detail: format!(
            "{checks} checks (modes 2-4, {STATES} states, {TUPLES} tuples), max |lhs-rhs| = {worst:.3e} (<{DOUBLE_COMMUTATOR:e}), {secs:.2} s (<{DOUBLE_COMMUTATOR_SECONDS} s)"
        ),
    }
}

fn unblocked_baseline(r: &Runs) -> Outcome {
    let mut textbook = 0.0f64;
    for n in [2usize, 4, 8, 12] {
        for dephasing in [Dephasing::Full, Dephasing::PopulationsOnly] {
            let ctx = chain_ctx(n, 0.05, 500.0, Blocking::Unblocked, dephasing);
            for k in 0..5u64 {
                let g = random_one_rdm(n, 300 + 10 * n as u64 + k);
                textbook = textbook.max(max_abs(
                    &(rhs_unblocked(&g, &ctx).unwrap() - textbook_redfield_rhs(&g, &ctx).unwrap()),
                ));
            }
        }
    }
    let res = &r.fig1_unblocked;
    let n = &res.summary.final_populations;
    let e = res.context.eigen().energies();
    let b = beta(res.scenario.bath.temperature);
    let mut ratio = 0.0f64;
    for i in 0..n.len() {
        for j in 0..n.len() {
            let expected = (-b * (e[i] - e[j])).exp();
            ratio = ratio.max(((n[i] / n[j]) / expected - 1.0).abs());
        }
    }
    let fd_gap = res.summary.max_fd_residual;
    Outcome {
        id: 5,
        title: "unblocked generator is textbook Redfield and thermalizes canonically",
        passed: textbook < UNBLOCKED_TEXTBOOK && ratio < CANONICAL_RATIO && fd_gap > DIFFERS_FROM_FD && res.summary.equilibrated,
        detail: format!(
            "max |unblocked-textbook| = {textbook:.3e} (<{UNBLOCKED_TEXTBOOK:e}), canonical ratio error = {ratio:.3e} (<{CANONICAL_RATIO:e}), max|n-n_FD| = {fd_gap:.3e} (>{DIFFERS_FROM_FD:e})"
        ),
    }
}

fn occupation_bounds(r: &Runs) -> Outcome {
    let mut parts = Vec::new();
    let mut passed = true;
    for res in [&r.fig1, &r.fig2, &r.fig3, &r.fig4] {
        let inv = &res.trajectory.invariants;
        let ok = inv.min_occupation >= -OCCUPATION_BOUND && inv.max_occupation <= 1.0 + OCCUPATION_BOUND;
        passed &= ok;
        parts.push(format!(
            "{} [{:.3e}, {:.6}]{}",
            res.scenario.name,
            inv.min_occupation,
            inv.max_occupation,
            if ok { "" } else { " out of bounds" }
        ));
    }
    Outcome {
        id: 6,
        title: "occupation eigenvalues stay in [0, 1]",
        passed,
        detail: format!("bound ±{OCCUPATION_BOUND:e}: {}", parts.join(", ")),
    }
}

fn non_constant_relaxation(r: &Runs) -> Outcome {
    let ratio = r.fig2.summary.effective_rate_ratio.unwrap_or(f64::NAN);
    Outcome {
        id: 7,
        title: "fig2 effective rate is non-constant",
        passed: ratio >= RATE_RATIO.0 && ratio <= RATE_RATIO.1,
        detail: format!(
            "max/min effective rate over 0.05 <= P_g <= 0.95 = {ratio:.3} (in [{}, {}])",
            RATE_RATIO.0, RATE_RATIO.1
        ),
    }
}

fn dephasing_necessity(r: &Runs) -> Outcome {
    let full = &r.fig3.summary;
    let pop = &r.fig3_populations_only.summary;
    let full_ok =
        full.max_site_deviation_from_mean <= SITE_MEAN && full.late_site_oscillation_amplitude < SITE_AMPLITUDE_DAMPED;
    let pop_ok =
        pop.max_fd_residual < FD_POPULATIONS_ONLY && pop.late_site_oscillation_amplitude > SITE_AMPLITUDE_SUSTAINED;
    Outcome {
        id: 8,
        title: "dephasing is needed to equalize fig3 site populations",
        passed: full_ok && pop_ok && full.final_time == pop.final_time,
        detail: format!(
            "full: max|site-0.5| = {:.3e} (<={SITE_MEAN}), late amplitude = {:.3e} (<{SITE_AMPLITUDE_DAMPED:e}); populations-only: max|n-n_FD| = {:.3e} (<{FD_POPULATIONS_ONLY:e}), late amplitude = {:.3e} (>{SITE_AMPLITUDE_SUSTAINED})",
            full.max_site_deviation_from_mean,
            full.late_site_oscillation_amplitude,
            pop.max_fd_residual,
            pop.late_site_oscillation_amplitude
        ),
    }
}

fn thermal_localization(r: &Runs) -> Outcome {
    let s = &r.fig4.summary;
    Outcome {
        id: 9,
        title: "fig4 long-range coherence shrinks on warming",
        passed: s.equilibrated && s.long_range_coherence_final < s.long_range_coherence_initial,
        detail: format!(
            "mean |γ(x,x')| for |x-x'| >= {}: t=0 {:.4e}, equilibrated at t={:e} {:.4e}",
            s.coherence_min_separation, s.long_range_coherence_initial, s.final_time, s.long_range_coherence_final
        ),
    }
}

fn integrator_order() -> Outcome {
    let steps = [4usize, 8, 16, 32, 64];
    let pts: Vec<(f64, f64)> = steps
        .iter()
        .map(|&n| {
            let y = integrate_fixed(&1.0f64, 0.0, 1.0, n, |_, y: &f64| Ok(-y)).unwrap();
            ((1.0 / n as f64).ln(), (y - (-1.0f64).exp()).abs().ln())
        })
        .collect();
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / pts.len() as f64;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / pts.len() as f64;
    let slope =
        pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum::<f64>() / pts.iter().map(|p| (p.0 - mx).powi(2)).sum::<f64>();
    Outcome {
        id: 10,
        title: "fixed-step RKF45 is fifth order",
        passed: slope >= ORDER_SLOPE.0 && slope <= ORDER_SLOPE.1,
        detail: format!(
            "log-log slope on dy/dt=-y over {steps:?} steps = {slope:.3} (in [{}, {}])",
            ORDER_SLOPE.0, ORDER_SLOPE.1
        ),
    }
}

fn oracle_equivalence() -> Outcome {
    let mut worst = 0.0f64;
    for n in [2usize, 4, 8, 12] {
        let ctx = chain_ctx(n, 0.05, 500.0, Blocking::Blocked, Dephasing::Full);
        for k in 0..50u64 {
            let g = random_one_rdm(n, 5000 + 100 * n as u64 + k);
            worst = worst.max(max_abs(
                &(rhs_fast(&g, &ctx).unwrap() - rhs_reference(&g, &ctx).unwrap()),
            ));
        }
    }
    Outcome {
        id: 11,
        title: "fast generator equals the literal summation",
        passed: worst < FAST_REFERENCE,
        detail: format!("max |fast-reference| = {worst:.3e} (<{FAST_REFERENCE:e}) on 50 inputs per N∈{{2,4,8,12}}"),
    }
}

fn main() -> ExitCode {
    let runs = std::thread::scope(|scope| {
        let fig1 = scope.spawn(|| run_builtin("fig1", |_| {}));
        let fig1_unblocked = scope.spawn(|| run_builtin("fig1", |s| s.generator.blocking = Blocking::Unblocked));
        let fig2 = scope.spawn(|| run_builtin("fig2", |_| {}));
        let fig3 = scope.spawn(|| run_builtin("fig3", |_| {}));
        let fig3_populations_only =
            scope.spawn(|| run_builtin("fig3", |s| s.generator.dephasing = Dephasing::PopulationsOnly));
        let fig4 = scope.spawn(|| run_builtin("fig4", |_| {}));
        Runs {
            fig1: fig1.join().unwrap(),
            fig1_unblocked: fig1_unblocked.join().unwrap(),
            fig2: fig2.join().unwrap(),
            fig3: fig3.join().unwrap(),
            fig3_populations_only: fig3_populations_only.join().unwrap(),
            fig4: fig4.join().unwrap(),
        }
    });

    let outcomes = [
        fd_equilibration(&runs),
        fd_stationarity(),
        detailed_balance(),
        double_commutator(),
        unblocked_baseline(&runs),
        occupation_bounds(&runs),
        non_constant_relaxation(&runs),
        dephasing_necessity(&runs),
        thermal_localization(&runs),
        integrator_order(),
        oracle_equivalence(),
    ];

    let mut unexpected = Vec::new();
    for o in &outcomes {
        let expected_fail = EXPECTED_FAILURES.contains(&o.id);
        let tag = match (o.passed, expected_fail) {
            (true, false) => "PASS",
            (false, true) => "FAIL (known)",
            (false, false) => "FAIL",
            (true, true) => "PASS (unexpected)",
        };
        println!("criterion {:>2} {tag}: {}: {}", o.id, o.title, o.detail);
        if o.passed == expected_fail {
            unexpected.push(o.id);
        }
    }
    let passed = outcomes.iter().filter(|o| o.passed).count();
    println!(
        "{passed}/{} criteria pass; known failures: {EXPECTED_FAILURES:?}",
        outcomes.len()
    );
    if unexpected.is_empty() {
        ExitCode::SUCCESS
    } else {
        println!("criteria not in their expected state: {unexpected:?}");
        ExitCode::FAILURE
    }
}
