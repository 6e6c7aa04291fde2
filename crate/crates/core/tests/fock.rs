//! Truncated number-basis oracle: thermal preparation, squeeze evolution
//! against closed-form photon statistics, state-integrity guards, and the
//! truncation convergence scan.

use approx::assert_relative_eq;
use dce_core::fock::{
    convergence_scan, default_steps, evolve_squeeze, photon_stats, thermal_density, FockDensity,
    DEFAULT_DIM, MAX_DIM, MAX_FOCK_SQUEEZE, TAIL_TOL,
};
use dce_core::{Error, C64};
use nalgebra::DMatrix;

#[test]
fn vacuum_is_a_clean_zero_photon_state() {
    let vac = FockDensity::vacuum(DEFAULT_DIM).unwrap();
    vac.validate().unwrap();
    let stats = photon_stats(&vac);
    assert_eq!(stats.mean_n, 0.0);
    assert_eq!(stats.var_n, 0.0);
    assert_eq!(stats.mean_a_sq, C64::new(0.0, 0.0));
    assert_eq!(vac.tail_mass(), 0.0);
}

#[test]
fn thermal_state_reproduces_bose_statistics() {
    let state = thermal_density(2.0, 60).unwrap();
    state.validate().unwrap();
    let stats = photon_stats(&state);
    // Tolerances sized to the renormalized-truncation bias at 60 levels.
    assert_relative_eq!(stats.mean_n, 2.0, max_relative = 1e-8);
    // Geometric photon distribution: Var N = n̄(n̄ + 1).
    assert_relative_eq!(stats.var_n, 6.0, max_relative = 1e-7);
    assert_eq!(stats.mean_a_sq, C64::new(0.0, 0.0));
    let total: f64 = state.populations().iter().sum();
    assert_relative_eq!(total, 1.0, max_relative = 1e-12);
}

#[test]
fn thermal_state_too_big_for_the_truncation_is_refused() {
    let err = thermal_density(5.0, 20).unwrap_err();
    assert!(matches!(err, Error::Truncation(_)));
    assert!(err.to_string().contains("dim"));
    assert!(thermal_density(5.0, 120).is_ok());
}

#[test]
fn squeezed_vacuum_matches_closed_form_photon_number() {
    let vac = FockDensity::vacuum(80).unwrap();
    let out = evolve_squeeze(&vac, 0.5, default_steps(0.5)).unwrap();
    out.validate().unwrap();
    let stats = photon_stats(&out);
    // sinh²(1/2), frozen from an independent evaluation.
    assert_relative_eq!(stats.mean_n, 0.2715403174076219, max_relative = 1e-9);
    assert_relative_eq!(stats.mean_a_sq.re, 0.5876005968219007, max_relative = 1e-9);
    assert!(stats.mean_a_sq.im.abs() < 1e-14);
}

#[test]
fn squeezed_thermal_matches_closed_form_photon_number() {
    // 120 levels keep the truncation bias of the widened distribution well
    // below the comparison tolerance.
    let state = thermal_density(1.0, 120).unwrap();
    let out = evolve_squeeze(&state, 0.5, default_steps(0.5)).unwrap();
    let stats = photon_stats(&out);
    assert_relative_eq!(stats.mean_n, 1.8146209522228658, max_relative = 1e-8);
}

#[test]
fn squeezing_the_vacuum_populates_even_levels_only() {
    let vac = FockDensity::vacuum(60).unwrap();
    let out = evolve_squeeze(&vac, 0.4, default_steps(0.4)).unwrap();
    let pops = out.populations();
    assert!(pops[0] > 0.8);
    for odd in (1..60).step_by(2) {
        assert!(pops[odd].abs() < 1e-12, "odd level {odd} populated: {}", pops[odd]);
    }
    assert!(pops[2] > pops[4] && pops[4] > pops[6]);
}

#[test]
fn zero_phase_evolution_is_the_identity() {
    let state = thermal_density(0.5, 40).unwrap();
    let out = evolve_squeeze(&state, 0.0, 1).unwrap();
    assert_eq!(out.rho, state.rho);
}

#[test]
fn evolution_domain_errors() {
    let vac = FockDensity::vacuum(40).unwrap();
    assert!(matches!(
        evolve_squeeze(&vac, MAX_FOCK_SQUEEZE + 0.1, 100).unwrap_err(),
        Error::Range(_)
    ));
    assert!(matches!(
        evolve_squeeze(&vac, 0.5, 0).unwrap_err(),
        Error::Validation { field: "steps", .. }
    ));
    assert!(evolve_squeeze(&vac, f64::NAN, 100).is_err());
}

#[test]
fn undersized_truncation_aborts_with_the_squeeze_phase() {
    // sinh²(1) ≈ 1.38 mean photons cannot fit in 8 levels cleanly.
    let vac = FockDensity::vacuum(8).unwrap();
    let err = evolve_squeeze(&vac, 1.0, default_steps(1.0)).unwrap_err();
    match err {
        Error::Truncation(msg) => {
            assert!(msg.contains("raise dim"), "unhelpful message: {msg}");
        }
        other => panic!("expected truncation failure, got {other:?}"),
    }
}

#[test]
fn corrupted_states_fail_validation() {
    let mut state = thermal_density(0.5, 20).unwrap();
    state.rho[(0, 0)] *= 2.0;
    assert!(matches!(state.validate().unwrap_err(), Error::StateIntegrity(_)));

    let mut lopsided = thermal_density(0.5, 20).unwrap();
    lopsided.rho[(2, 0)] = C64::new(0.3, 0.1);
    assert!(matches!(lopsided.validate().unwrap_err(), Error::StateIntegrity(_)));

    // A Hermitian, unit-trace matrix with a negative eigenvalue.
    let mut indefinite = DMatrix::<C64>::zeros(20, 20);
    indefinite[(0, 0)] = C64::new(1.2, 0.0);
    indefinite[(1, 1)] = C64::new(-0.2, 0.0);
    let bad = FockDensity { dim: 20, rho: indefinite };
    assert!(matches!(bad.validate().unwrap_err(), Error::StateIntegrity(_)));
}

#[test]
fn evolution_guards_catch_injected_trace_drift() {
    let mut state = thermal_density(0.2, 30).unwrap();
    // Slightly denormalize: the per-step trace guard must notice.
    state.rho[(0, 0)] += C64::new(5e-7, 0.0);
    let err = evolve_squeeze(&state, 0.3, 10).unwrap_err();
    assert!(matches!(err, Error::StateIntegrity(_)));
}

#[test]
fn convergence_scan_flags_the_first_settled_dimension() {
    let reports = convergence_scan(0.0, 0.5, &[40, 60, 80]).unwrap();
    assert_eq!(reports.len(), 2, "scan should stop at the first agreeing pair");
    assert!(reports[0].converged);
    assert!(!reports[1].converged);
    assert!(reports[0].tail_mass < TAIL_TOL);
    assert_relative_eq!(reports[0].mean_n, 0.2715403174076219, max_relative = 1e-8);
}

#[test]
fn convergence_scan_reports_honest_numbers_for_tiny_dimensions() {
    // Dimensions far too small for the state: no convergence flag, tails
    // reported large, no error.
    let reports = convergence_scan(1.0, 1.0, &[8, 12]).unwrap();
    assert_eq!(reports.len(), 2);
    assert!(reports.iter().all(|r| !r.converged));
    assert!(reports[0].tail_mass > TAIL_TOL);
}

#[test]
fn convergence_scan_validates_its_dimension_ladder() {
    for dims in [&[][..], &[40, 40][..], &[60, 40][..]] {
        let err = convergence_scan(0.0, 0.5, dims).unwrap_err();
        assert!(matches!(err, Error::Validation { field: "dims", .. }));
    }
    assert!(convergence_scan(0.0, 0.5, &[1]).is_err());
    assert!(convergence_scan(0.0, 0.5, &[MAX_DIM + 1]).is_err());
    assert!(matches!(
        convergence_scan(0.0, 3.0, &[40]).unwrap_err(),
        Error::Range(_)
    ));
}

#[test]
fn default_step_count_tracks_the_phase() {
    assert_eq!(default_steps(0.0), 1);
    assert_eq!(default_steps(0.5), 500);
    assert_eq!(default_steps(2.0), 2000);
}
