//! Unit reduction: regression-pinned coupling values, thermal-occupancy
//! identities, and validation failures that name the offending field.

use approx::assert_relative_eq;
use dce_core::params::{
    coupling_g, flight_time, reduce, reduce_with_occupancy, resonance_flight_times,
    thermal_occupancy, CavityConfig, DimensionlessGroups, ElectronConfig, PhysicalConstants,
};
use dce_core::Error;
use proptest::prelude::*;
use std::f64::consts::PI;

const CONSTS: PhysicalConstants = PhysicalConstants::codata();

fn cavity(volume: f64) -> CavityConfig {
    CavityConfig {
        omega: 2.0 * PI * 1e10,
        volume,
        lambda_sq: 0.05 * 2.0 * PI * 1e10,
        temperature: 0.0,
    }
}

fn electron() -> ElectronConfig {
    ElectronConfig {
        v0: 1e7,
        sigma_x: 1e-6,
        flight_length: 2e-3,
    }
}

#[test]
fn coupling_matches_frozen_reference_values() {
    // Independently evaluated e·√(ħω/(2Vε₀)) at ω = 2π·10¹⁰ rad/s.
    let g = coupling_g(&cavity(1e-6), &CONSTS).unwrap();
    assert_relative_eq!(g, 9.800518336063127e-23, max_relative = 1e-14);
    let g = coupling_g(&cavity(5e-3), &CONSTS).unwrap();
    assert_relative_eq!(g, 1.3860025949146672e-24, max_relative = 1e-14);
}

#[test]
fn coupling_scales_as_sqrt_frequency_over_volume() {
    proptest!(|(k in 1e-3f64..1e3, v in 1e-9f64..1e-1)| {
        let base = cavity(v);
        let scaled = CavityConfig { omega: k * base.omega, ..base };
        let g0 = coupling_g(&base, &CONSTS).unwrap();
        let gk = coupling_g(&scaled, &CONSTS).unwrap();
        prop_assert!((gk / g0 / k.sqrt() - 1.0).abs() < 1e-12);
    });
}

#[test]
fn thermal_occupancy_hits_exact_anchors() {
    // ħω/(k_B·T) = ln 2 makes the Bose factor exactly one.
    let omega = 2.0 * PI * 1e10;
    let t_ln2 = CONSTS.hbar * omega / (CONSTS.k_boltzmann * std::f64::consts::LN_2);
    assert_relative_eq!(
        thermal_occupancy(omega, t_ln2, &CONSTS).unwrap(),
        1.0,
        max_relative = 1e-12
    );
    assert_eq!(thermal_occupancy(omega, 0.0, &CONSTS).unwrap(), 0.0);
    // High-temperature point where the naive exp(x) − 1 would lose digits.
    let t_small_x = CONSTS.hbar * omega / (CONSTS.k_boltzmann * 1e-3);
    assert_relative_eq!(
        thermal_occupancy(omega, t_small_x, &CONSTS).unwrap(),
        999.500083333332,
        max_relative = 1e-12
    );
}

#[test]
fn thermal_occupancy_satisfies_detailed_balance_identity() {
    // n = e^{−x}(1 + n) for the Bose distribution at any temperature.
    proptest!(|(t in 1e-3f64..1e4)| {
        let omega = 2.0 * PI * 1e10;
        let n = thermal_occupancy(omega, t, &CONSTS).unwrap();
        let x = CONSTS.hbar * omega / (CONSTS.k_boltzmann * t);
        prop_assert!((n - (-x).exp() * (1.0 + n)).abs() <= 1e-12 * (1.0 + n));
    });
}

#[test]
fn flight_time_and_resonances() {
    assert_relative_eq!(flight_time(&electron()).unwrap(), 2e-10, max_relative = 1e-15);
    let omega = 2.0 * PI * 1e10;
    let times = resonance_flight_times(omega, 5).unwrap();
    assert_eq!(times.len(), 5);
    for (i, tau) in times.iter().enumerate() {
        assert_relative_eq!(tau * omega, PI * (i as f64 + 1.0), max_relative = 1e-15);
    }
    let err = resonance_flight_times(omega, 0).unwrap_err();
    assert!(matches!(err, Error::Validation { field: "n_max", .. }));
}

#[test]
fn reduce_produces_expected_groups() {
    let groups = reduce(&cavity(1e-6), &electron(), &CONSTS).unwrap();
    assert_relative_eq!(groups.r, 0.05, max_relative = 1e-15);
    assert_relative_eq!(groups.theta, 4.0 * PI, max_relative = 1e-15);
    assert_eq!(groups.n_th, 0.0);
    assert_relative_eq!(groups.eps_kick, 1.3354245720993778e-36, max_relative = 1e-14);
    assert_relative_eq!(groups.k0, 4.5546918507500006e-17, max_relative = 1e-15);
    assert_relative_eq!(groups.g_tilde(), 6.348873366354198e-7, max_relative = 1e-13);
    assert_relative_eq!(groups.quantum_energy, CONSTS.hbar * 2.0 * PI * 1e10, max_relative = 1e-15);
    // Kick scale is consistent between its SI and oscillator-unit forms.
    let gt = groups.g_tilde();
    assert_relative_eq!(
        groups.eps_kick,
        0.5 * gt * gt * groups.quantum_energy,
        max_relative = 1e-12
    );
}

#[test]
fn reduce_is_bitwise_deterministic() {
    let a = reduce(&cavity(5e-3), &electron(), &CONSTS).unwrap();
    let b = reduce(&cavity(5e-3), &electron(), &CONSTS).unwrap();
    for (x, y) in [
        (a.r, b.r),
        (a.theta, b.theta),
        (a.n_th, b.n_th),
        (a.eps_kick, b.eps_kick),
        (a.k0, b.k0),
        (a.g_over, b.g_over),
        (a.quantum_energy, b.quantum_energy),
        (a.sigma_x_tilde, b.sigma_x_tilde),
    ] {
        assert_eq!(x.to_bits(), y.to_bits());
    }
}

#[test]
fn occupancy_override_wins_over_temperature() {
    let mut hot = cavity(1e-6);
    hot.temperature = 300.0;
    let direct = reduce(&hot, &electron(), &CONSTS).unwrap();
    assert!(direct.n_th > 0.0);
    let forced = reduce_with_occupancy(&hot, &electron(), &CONSTS, Some(7.0)).unwrap();
    assert_eq!(forced.n_th, 7.0);
    let bad = reduce_with_occupancy(&hot, &electron(), &CONSTS, Some(-1.0)).unwrap_err();
    assert!(matches!(bad, Error::Validation { field: "n_th", .. }));
}

#[test]
fn validation_errors_name_the_field() {
    let mut bad_cavity = cavity(1e-6);
    bad_cavity.volume = -1.0;
    let err = reduce(&bad_cavity, &electron(), &CONSTS).unwrap_err();
    assert!(matches!(err, Error::Validation { field: "volume", .. }));
    assert!(err.to_string().contains("volume"));

    let mut bad_electron = electron();
    bad_electron.v0 = 0.0;
    let err = reduce(&cavity(1e-6), &bad_electron, &CONSTS).unwrap_err();
    assert!(matches!(err, Error::Validation { field: "v0", .. }));

    let mut nan_cavity = cavity(1e-6);
    nan_cavity.temperature = f64::NAN;
    assert!(reduce(&nan_cavity, &electron(), &CONSTS).is_err());
}

#[test]
fn bare_groups_are_self_consistent() {
    let g = DimensionlessGroups::bare(0.1, PI, 2.0, 1e-6, 1e-2, 3.0);
    assert_eq!(g.quantum_energy, 1.0);
    assert_relative_eq!(g.g_tilde(), 1e-6, max_relative = 1e-15);
    assert_relative_eq!(g.p0_tilde(), 1e-2, max_relative = 1e-15);
    assert_relative_eq!(g.eps_kick, 0.5e-12, max_relative = 1e-15);
    assert_relative_eq!(g.k0, 0.5e-4, max_relative = 1e-15);
    assert_relative_eq!(g.sigma_p_tilde_min() * g.sigma_x_tilde, 0.5, max_relative = 1e-15);
}
