// SPDX-License-Identifier: Apache-2.0

mod common;

use common::{chain_context, max_abs, random_gamma};
use pauli_redfield::bath::{gamma_rate, BathSpec, DEFAULT_PEAKS};
use pauli_redfield::density::hermiticity_residual;
use pauli_redfield::generator::{
    mk_identity_check, pauli_kinetics_rhs, rhs_fast, rhs_reference, rhs_unblocked, Blocking, Dephasing,
    GeneratorContext,
};
use pauli_redfield::model::{chemical_potential, fd_density, fd_occupations, ChainSpec};
use pauli_redfield::oracles::{random_mixed_state, textbook_redfield_rhs, FockSpace};
use pauli_redfield::{CMatrix, C64};
use proptest::prelude::*;

fn relative_trace(rhs: &CMatrix) -> f64 {
    let scale: f64 = rhs.diagonal().iter().map(|z| z.norm()).sum();
    if scale == 0.0 {
        0.0
    } else {
        rhs.trace().norm() / scale
    }
}

#[test]
fn fast_matches_reference_on_random_states() {
    for n in [2usize, 4, 8] {
        for blocking in [Blocking::Blocked, Blocking::Unblocked] {
            let ctx = chain_context(n, 0.05, 500.0, blocking, Dephasing::Full);
            for seed in 0..10 {
                let g = random_gamma(n, seed);
                let r = rhs_reference(&g, &ctx).unwrap();
                let f = rhs_fast(&g, &ctx).unwrap();
                assert!(max_abs(&(&r - &f)) < 1e-12, "n={n} {blocking:?} seed={seed}");
            }
        }
    }
}

#[test]
fn fast_matches_reference_in_populations_only_mode() {
    let ctx = chain_context(6, 0.05, 5000.0, Blocking::Blocked, Dephasing::PopulationsOnly);
    for seed in 0..5 {
        let g = random_gamma(6, 100 + seed);
        let r = rhs_reference(&g, &ctx).unwrap();
        let f = rhs_fast(&g, &ctx).unwrap();
        assert!(max_abs(&(&r - &f)) < 1e-12);
    }
}

#[test]
fn fermi_dirac_is_stationary() {
    for n in [2usize, 8, 12] {
        for t in [300.0, 500.0, 5000.0] {
            let ctx = chain_context(n, 0.005, t, Blocking::Blocked, Dephasing::Full);
            let mu = chemical_potential(ctx.eigen().energies(), n / 2, t).unwrap();
            let fd = fd_density(ctx.eigen().energies(), mu, t);
            let scale = ctx.rate_scale();
            for rhs in [
                rhs_fast(fd.matrix(), &ctx).unwrap(),
                rhs_reference(fd.matrix(), &ctx).unwrap(),
            ] {
                assert!(
                    max_abs(&rhs) < 1e-13 * scale,
                    "n={n} T={t}: {:e}",
                    max_abs(&rhs) / scale
                );
            }
        }
    }
}

#[test]
fn fermi_dirac_is_not_stationary_without_blocking() {
    let ctx = chain_context(12, 0.005, 500.0, Blocking::Blocked, Dephasing::Full);
    let mu = chemical_potential(ctx.eigen().energies(), 6, 500.0).unwrap();
    let fd = fd_density(ctx.eigen().energies(), mu, 500.0);
    let r = rhs_unblocked(fd.matrix(), &ctx).unwrap();
    assert!(max_abs(&r) > 1e-3 * ctx.rate_scale());
}

#[test]
fn unblocked_matches_textbook_redfield() {
    for n in [2usize, 4, 8, 12] {
        for dephasing in [Dephasing::Full, Dephasing::PopulationsOnly] {
            let ctx = chain_context(n, 0.05, 500.0, Blocking::Unblocked, dephasing);
            for seed in 0..5 {
                let g = random_gamma(n, 7 * seed + 1);
                let a = rhs_unblocked(&g, &ctx).unwrap();
                let b = textbook_redfield_rhs(&g, &ctx).unwrap();
                assert!(max_abs(&(&a - &b)) < 1e-12, "n={n} {dephasing:?}");
            }
        }
    }
}

#[test]
fn zero_coupling_is_pure_coherent_rotation() {
    let chain = ChainSpec::new(4, 1.0, 0.05, 2).unwrap();
    let empty = BathSpec {
        temperature: 300.0,
        peaks_per_site: vec![vec![]; 4],
    };
    let ctx = GeneratorContext::for_chain(&chain, &empty, Blocking::Unblocked, Dephasing::Full).unwrap();
    let g = random_gamma(4, 3);
    let r = textbook_redfield_rhs(&g, &ctx).unwrap();
    for a in 0..4 {
        for b in 0..4 {
            let expect = C64::new(0.0, -ctx.eigen().frequency(a, b)) * g[(a, b)];
            assert!((r[(a, b)] - expect).norm() < 1e-15);
        }
    }
}

#[test]
fn diagonal_states_follow_blocked_pauli_kinetics() {
    let ctx = chain_context(8, 0.05, 300.0, Blocking::Blocked, Dephasing::Full);
    let k = ctx.kinetic_rates();
    let n = [0.9, 1.0, 0.2, 0.7, 0.05, 0.0, 0.6, 0.3];
    let g = pauli_redfield::DensityMatrix::from_populations(&n);
    let r = rhs_fast(g.matrix(), &ctx).unwrap();
    let dn = pauli_kinetics_rhs(&n, &k, Blocking::Blocked).unwrap();
    for a in 0..8 {
        for b in 0..8 {
            if a == b {
                assert!((r[(a, a)].re - dn[a]).abs() < 1e-15);
                assert_eq!(r[(a, a)].im, 0.0);
            } else {
                assert_eq!(r[(a, b)], C64::default(), "diagonal closure broken at ({a},{b})");
            }
        }
    }
    // Blocking removed on both sides.
    let r = textbook_redfield_rhs(g.matrix(), &ctx).unwrap();
    let dn = pauli_kinetics_rhs(&n, &k, Blocking::Unblocked).unwrap();
    for a in 0..8 {
        assert!((r[(a, a)].re - dn[a]).abs() < 1e-15);
    }
}

#[test]
fn kinetic_rates_obey_detailed_balance_and_fd_is_fixed_point() {
    let t = 500.0;
    let ctx = chain_context(12, 0.005, t, Blocking::Blocked, Dephasing::Full);
    let k = ctx.kinetic_rates();
    let e = ctx.eigen().energies();
    let beta = pauli_redfield::model::beta(t);
    for i in 0..12 {
        for j in 0..12 {
            if k[(j, i)] > 1e-300 {
                let ratio = k[(i, j)] / k[(j, i)];
                let expect = (beta * (e[j] - e[i])).exp();
                assert!((ratio / expect - 1.0).abs() < 1e-12);
            }
        }
    }
    let mu = chemical_potential(e, 6, t).unwrap();
    let n = fd_occupations(e, mu, t);
    let dn = pauli_kinetics_rhs(n.as_slice(), &k, Blocking::Blocked).unwrap();
    assert!(dn.amax() < 1e-14 * ctx.rate_scale());
}

/// Independent two-level blocked kinetics, bath on site 0 only.
#[test]
fn two_level_hand_coded_kinetics() {
    let (hop, t) = (0.01, 300.0);
    let chain = ChainSpec::new(2, 1.0, hop, 1).unwrap();
    let bath = BathSpec {
        temperature: t,
        peaks_per_site: vec![DEFAULT_PEAKS.to_vec(), vec![]],
    };
    let ctx = GeneratorContext::for_chain(&chain, &bath, Blocking::Blocked, Dephasing::Full).unwrap();
    // Levels E ∓ |t|, eigenvectors (1, ∓1)/√2, so |V⁰_01|² = 1/4.
    let w = 2.0 * hop;
    let down = gamma_rate(w, t, &DEFAULT_PEAKS).unwrap();
    let up = gamma_rate(-w, t, &DEFAULT_PEAKS).unwrap();
    for (n0, n1) in [(0.3, 0.6), (1.0, 0.0), (0.0, 1.0), (0.5, 0.5)] {
        let g = pauli_redfield::DensityMatrix::from_populations(&[n0, n1]);
        let r = rhs_fast(g.matrix(), &ctx).unwrap();
        let dn0 = 2.0 * 0.25 * (down * n1 * (1.0 - n0) - up * n0 * (1.0 - n1));
        assert!((r[(0, 0)].re - dn0).abs() < 1e-16, "{} vs {dn0}", r[(0, 0)].re);
        assert!((r[(1, 1)].re + dn0).abs() < 1e-16);
    }
}

#[test]
fn blocking_is_a_second_order_correction_in_the_dilute_limit() {
    let ctx = chain_context(12, 0.005, 500.0, Blocking::Blocked, Dephasing::Full);
    let base = random_gamma(12, 42);
    let base = &base * C64::new(1.0 / base.trace().re, 0.0);
    let ratio = |scale: f64| {
        let g = &base * C64::new(scale, 0.0);
        let blocked = rhs_fast(&g, &ctx).unwrap();
        let unblocked = rhs_unblocked(&g, &ctx).unwrap();
        let max_n = g.diagonal().iter().map(|z| z.re).fold(0.0, f64::max);
        (max_abs(&(&blocked - &unblocked)) / max_abs(&unblocked), max_n)
    };
    let (r1, n1) = ratio(1.0);
    let (r2, _) = ratio(0.01);
    assert!(r1 < 4.0 * n1, "relative difference {r1} for max n {n1}");
    assert!((r2 / r1 - 0.01).abs() < 2e-3, "{}", r2 / r1);
}

#[test]
fn double_commutator_identity_on_correlated_states() {
    use rand::{Rng, SeedableRng};
    for modes in [2usize, 3, 4] {
        let fs = FockSpace::new(modes).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(modes as u64);
        for seed in 0..10 {
            let rho = random_mixed_state(modes, seed).unwrap();
            for _ in 0..50 {
                let idx: [usize; 6] = std::array::from_fn(|_| rng.random_range(0..modes));
                let (lhs, rhs) = mk_identity_check(idx, &rho, &fs).unwrap();
                assert!((lhs - rhs).norm() < 1e-10, "{idx:?}: {lhs} vs {rhs}");
            }
        }
    }
}

#[test]
fn double_commutator_two_mode_example() {
    // A pure single-particle state (|10⟩ + |01⟩)/√2 would give γ₀₁ = 0.5; mix
    // it so that the 1-RDM is [[0.5, 0.2], [0.2, 0.5]].
    let fs = FockSpace::new(2).unwrap();
    let mut rho = CMatrix::zeros(4, 4);
    // Basis: 0 = |00⟩, 1 = mode 0, 2 = mode 1, 3 = both.
    rho[(1, 1)] = C64::new(0.5, 0.0);
    rho[(2, 2)] = C64::new(0.5, 0.0);
    rho[(1, 2)] = C64::new(0.2, 0.0);
    rho[(2, 1)] = C64::new(0.2, 0.0);
    let gamma = fs.one_rdm(&rho);
    assert!((gamma[(0, 1)].norm() - 0.2).abs() < 1e-15);
    assert!((gamma[(0, 0)].re - 0.5).abs() < 1e-15);
    let (lhs, rhs) = mk_identity_check([0, 1, 1, 0, 0, 1], &rho, &fs).unwrap();
    assert!((lhs - C64::new(0.4, 0.0)).norm() < 1e-14, "{lhs}");
    assert!((rhs - C64::new(0.4, 0.0)).norm() < 1e-14);
    let (lhs, rhs) = mk_identity_check([1; 6], &rho, &fs).unwrap();
    assert_eq!((lhs, rhs), (C64::default(), C64::default()));
}

#[test]
fn mk_check_rejects_bad_input() {
    let fs = FockSpace::new(2).unwrap();
    let bad = CMatrix::identity(4, 4);
    assert!(mk_identity_check([0; 6], &bad, &fs).is_err());
    let rho = random_mixed_state(2, 0).unwrap();
    assert!(mk_identity_check([0, 0, 0, 0, 0, 2], &rho, &fs).is_err());
}

#[test]
fn rejects_mismatched_dimensions() {
    let ctx = chain_context(4, 0.05, 300.0, Blocking::Blocked, Dephasing::Full);
    let g = CMatrix::zeros(3, 3);
    assert!(rhs_fast(&g, &ctx).is_err());
    assert!(rhs_reference(&g, &ctx).is_err());
    assert!(textbook_redfield_rhs(&g, &ctx).is_err());
    assert!(pauli_kinetics_rhs(&[0.5; 3], &ctx.kinetic_rates(), Blocking::Blocked).is_err());
}

#[test]
fn fast_evaluation_of_32_site_chain_is_interactive() {
    let ctx = chain_context(32, 0.05, 5000.0, Blocking::Blocked, Dephasing::Full);
    let g = random_gamma(32, 9);
    let start = std::time::Instant::now();
    let r = rhs_fast(&g, &ctx).unwrap();
    let elapsed = start.elapsed();
    assert!(r.iter().all(|z| z.re.is_finite()));
    assert!(elapsed.as_secs_f64() < 0.1, "{elapsed:?}");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn rhs_preserves_trace_and_hermiticity(
        seed in 0u64..10_000,
        n in 2usize..10,
        temperature in 100.0f64..6000.0,
        hopping in 0.002f64..0.08,
        blocked in any::<bool>(),
        full in any::<bool>(),
    ) {
        let blocking = if blocked { Blocking::Blocked } else { Blocking::Unblocked };
        let dephasing = if full { Dephasing::Full } else { Dephasing::PopulationsOnly };
        let ctx = chain_context(n, hopping, temperature, blocking, dephasing);
        let g = random_gamma(n, seed);
        let r = rhs_fast(&g, &ctx).unwrap();
        prop_assert!(relative_trace(&r) < 1e-13);
        prop_assert!(hermiticity_residual(&r) <= 1e-12 * max_abs(&r).max(1e-300));
    }

    #[test]
    fn diagonal_input_gives_diagonal_output(
        pops in proptest::collection::vec(0.0f64..1.0, 6),
        temperature in 100.0f64..6000.0,
    ) {
        let ctx = chain_context(6, 0.05, temperature, Blocking::Blocked, Dephasing::Full);
        let g = pauli_redfield::DensityMatrix::from_populations(&pops);
        let r = rhs_fast(g.matrix(), &ctx).unwrap();
        let off = &r - CMatrix::from_diagonal(&r.diagonal());
        prop_assert_eq!(max_abs(&off), 0.0);
    }
}
