//! Named cross-validation checks tying the closed forms, the transfer-matrix
//! oracle, and the truncated-Fock oracle to each other. Each check reduces to
//! a single measured number against a bound, so the results can be printed as
//! machine-readable pass/fail lines.
//!
//! Checks that compare engine paths against each other run on pinned harness
//! parameters chosen so the compared quantities are resolvable in f64; checks
//! of the configured physical point use the caller's groups and tolerance.

use std::f64::consts::PI;

use crate::analytic;
use crate::exec;
use crate::fock;
use crate::params::DimensionlessGroups;
use crate::propagator::{
    kinetic_moments, propagate, Frame, GaussianMoments, ModelFlags, TransferMatrix,
};
use crate::{Error, Result, C64};

/// Outcome of one named check: `passed` iff `measured <= bound`.
#[derive(Debug, Clone, PartialEq)]
pub struct CheckResult {
    pub name: &'static str,
    pub passed: bool,
    pub measured: f64,
    pub bound: f64,
    pub detail: String,
}

/// Harness coupling for oracle-vs-closed-form energy comparisons: small
/// enough that the one-way-coupling commutator drift (~6·g̃) stays below
/// every bound, large enough that kick energies stay far above the f64
/// rounding floor of the baseline kinetic energy.
const HARNESS_G_TILDE: f64 = 1e-9;
/// Harness electron state for energy-shift comparisons: mean momentum and
/// momentum spread sized so kick-induced variance changes land many decades
/// above ulp(p̄̃² + σ_p̃²) yet keep σ_x̃·σ_p̃ = 1/2.
const HARNESS_P0: f64 = 5e-6;
const HARNESS_SIGMA_P: f64 = 1e-6;
/// Harness parameters for the variance-ratio measurement; the larger
/// coupling keeps the variance shift well clear of rounding in the narrow
/// state while σ_p̃/p̄̃ = 0.1 keeps fourth-moment corrections at the 1% level.
const VAR_G_TILDE: f64 = 1e-6;
const VAR_P0: f64 = 1e-2;
const VAR_SIGMA_P: f64 = 1e-3;
/// Integration tolerance for the pinned oracle-comparison grids.
const GRID_TOL: f64 = 1e-12;
/// Pinned tolerance of the resonant-null propagation check.
const NULL_TOL: f64 = 1e-9;
/// Shape function below this is excluded from ratio measurements (0/0).
const MIN_SHAPE_F: f64 = 1e-3;

/// Run every check. `tol` is the configured integration tolerance (drives
/// the commutator and momentum-row checks); `fock_dim` optionally pins the
/// Fock truncation ladder's starting dimension.
pub fn run_all(groups: &DimensionlessGroups, tol: f64, fock_dim: Option<usize>) -> Vec<CheckResult> {
    vec![
        vacuum_shape(),
        resonant_null(groups),
        closed_form_grid(),
        p_row_closed_form(groups, tol),
        commutator_residual(groups, tol),
        commutator_scaling(groups, tol),
        mean_n_decoupled(groups, tol),
        fock_photon_law(groups, fock_dim),
        thermal_enhancement(),
        photon_identity(),
        resonant_identity(),
        kick_quadrature(),
        small_squeeze_scaling(),
        variance_ratio(),
    ]
    .into_iter()
    .flatten()
    .collect()
}

fn guard<F>(name: &'static str, bound: f64, body: F) -> CheckResult
where
    F: FnOnce() -> Result<(f64, String)>,
{
    match body() {
        Ok((measured, detail)) => CheckResult {
            name,
            passed: measured <= bound,
            measured,
            bound,
            detail,
        },
        Err(err) => CheckResult {
            name,
            passed: false,
            measured: f64::NAN,
            bound,
            detail: err.to_string(),
        },
    }
}

/// Low-discrepancy points in [lo, hi): golden-ratio sequence, deterministic
/// across runs and platforms.
fn golden_points(count: usize, lo: f64, hi: f64) -> Vec<f64> {
    const STEP: f64 = 0.618_033_988_749_894_9;
    (1..=count)
        .map(|k| {
            let frac = (0.5 + STEP * k as f64).fract();
            lo + (hi - lo) * frac
        })
        .collect()
}

fn linspace(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    if count == 1 {
        return vec![lo];
    }
    (0..count)
        .map(|k| lo + (hi - lo) * k as f64 / (count - 1) as f64)
        .collect()
}

fn harness_groups(r: f64, theta: f64, n_th: f64) -> DimensionlessGroups {
    DimensionlessGroups::bare(r, theta, n_th, HARNESS_G_TILDE, HARNESS_P0, 1.0)
}

fn harness_state(groups: &DimensionlessGroups) -> Result<GaussianMoments> {
    GaussianMoments::narrow_momentum(groups, HARNESS_SIGMA_P)
}

/// Mean kinetic-energy shift of one canonical propagation minus its t = 0
/// baseline, in the harness state.
fn propagated_shift(groups: &DimensionlessGroups, theta: f64, tol: f64) -> Result<f64> {
    let flags = ModelFlags::canonical();
    let init = harness_state(groups)?;
    let base = kinetic_moments(&TransferMatrix::identity(flags), &init, groups)?;
    let phi = propagate(&flags, groups, theta, tol)?;
    let report = kinetic_moments(&phi, &init, groups)?;
    Ok(report.mean_k - base.mean_k)
}

/// f(0, θ) = sin²θ over 1000 low-discrepancy phases.
fn vacuum_shape() -> Vec<CheckResult> {
    vec![guard("vacuum_shape", 1e-12, || {
        let mut worst: f64 = 0.0;
        for theta in golden_points(1000, 0.0, 8.0 * PI) {
            let f = analytic::mean_kinetic_shift(0.0, theta, 0.0, 1.0)?.f;
            let s = theta.sin();
            worst = worst.max((f - s * s).abs());
        }
        Ok((worst, "max |f(0,θ) − sin²θ| over 1000 phases in [0, 8π)".into()))
    })]
}

/// Zero net energy shift at r = 0, θ = πn, from the closed form and from the
/// integrated propagator, measured in units of eps_kick·(1 + 2n_th).
fn resonant_null(groups: &DimensionlessGroups) -> Vec<CheckResult> {
    let groups = *groups;
    vec![guard("resonant_null", 1e-12, move || {
        let scale = groups.eps_kick * (1.0 + 2.0 * groups.n_th);
        let still = DimensionlessGroups { r: 0.0, ..groups };
        let mut worst: f64 = 0.0;
        for n in 1..=10u32 {
            let theta = PI * f64::from(n);
            let closed = analytic::mean_kinetic_shift(0.0, theta, groups.n_th, groups.eps_kick)?;
            worst = worst.max(closed.delta_k / scale);
            let shift = propagated_shift(&still, theta, NULL_TOL)?;
            worst = worst.max(shift.abs() / scale);
        }
        Ok((worst, "max |ΔK|/(eps·(1+2n_th)) at r = 0, θ = πn, n = 1..10".into()))
    })]
}

/// Propagated mean energy shift vs the closed form on a small (r, θ, n_th)
/// grid at harness scales, in units of eps_kick·(1 + 2n_th).
fn closed_form_grid() -> Vec<CheckResult> {
    vec![guard("closed_form_grid", 1e-7, || {
        let mut points = Vec::new();
        for &n_th in &[0.0, 1.0] {
            for r in linspace(0.0, 0.2, 5) {
                for theta in linspace(0.5, 4.0 * PI, 5) {
                    points.push((r, theta, n_th));
                }
            }
        }
        let errs = exec::map_indexed(&points, |&(r, theta, n_th)| -> Result<f64> {
            let groups = harness_groups(r, theta, n_th);
            let closed = analytic::mean_kinetic_shift(r, theta, n_th, groups.eps_kick)?;
            let shift = propagated_shift(&groups, theta, GRID_TOL)?;
            Ok((shift - closed.delta_k).abs() / (groups.eps_kick * (1.0 + 2.0 * n_th)))
        });
        let mut worst: f64 = 0.0;
        for err in errs {
            worst = worst.max(err?);
        }
        Ok((worst, "max |ΔK_ode − ΔK_closed|/(eps·(1+2n_th)) on a 5×5×2 grid".into()))
    })]
}

/// Momentum-row field coefficients of the canonical transfer matrix vs the
/// closed form (c1 − i·c2)/(r² + 4), compared at the coupling-free scale.
fn p_row_closed_form(groups: &DimensionlessGroups, tol: f64) -> Vec<CheckResult> {
    let groups = *groups;
    vec![guard("p_row_closed_form", 10.0 * tol, move || {
        let g = groups.g_tilde();
        if g == 0.0 {
            return Ok((0.0, "coupling is zero; momentum row is trivially exact".into()));
        }
        let phi = propagate(&ModelFlags::canonical(), &groups, groups.theta, tol)?;
        let k = analytic::kick_coefficients(groups.r, groups.theta)?;
        let expect = C64::new(k.c1, -k.c2) / k.denom;
        let err_a = (phi.phi[(1, 2)] / g - expect).norm();
        let err_adag = (phi.phi[(1, 3)] / g - expect.conj()).norm();
        Ok((
            err_a.max(err_adag),
            format!("p-row (a, a†) coefficient error at r = {}, θ = {}", groups.r, groups.theta),
        ))
    })]
}

/// Commutator preservation across all flag variants at the configured point.
/// The bound is fixed: with back-action off the one-way coupling drifts the
/// cross commutators by about 6·g̃, and the integrator must not add more.
fn flag_variants() -> [ModelFlags; 4] {
    let canonical = ModelFlags::canonical();
    [
        canonical,
        ModelFlags { rwa: false, ..canonical },
        ModelFlags { backaction: true, ..canonical },
        ModelFlags { frame: Frame::Lab, ..canonical },
    ]
}

/// Canonical-structure preservation at the harness coupling, every flag
/// variant, absolute bound 10⁻⁷. At g̃ = 10⁻⁹ the deliberate one-way-coupling
/// drift is negligible, so the residual isolates integration error: loosening
/// the tolerance far enough must fail this check.
fn commutator_residual(groups: &DimensionlessGroups, tol: f64) -> Vec<CheckResult> {
    let groups = DimensionlessGroups::bare(
        groups.r,
        groups.theta,
        groups.n_th,
        HARNESS_G_TILDE,
        HARNESS_P0,
        1.0,
    );
    vec![guard("commutator_residual", 1e-7, move || {
        let mut worst: f64 = 0.0;
        for flags in &flag_variants() {
            let phi = propagate(flags, &groups, groups.theta, tol)?;
            worst = worst.max(phi.residual);
        }
        Ok((
            worst,
            format!(
                "max residual over 4 flag variants at tol {tol:e}, harness coupling {HARNESS_G_TILDE:e}"
            ),
        ))
    })]
}

/// Canonical-structure preservation at the configured coupling, per-variant
/// bounds. With back-action on the flow is Hamiltonian, so the residual is
/// pure integration error and must sit under 100·tol; with back-action off
/// the one-way coupling breaks the structure by design at O(g̃θ), so those
/// variants get a drift allowance on top. Measured value is the worst
/// residual/bound ratio.
fn commutator_scaling(groups: &DimensionlessGroups, tol: f64) -> Vec<CheckResult> {
    let groups = *groups;
    vec![guard("commutator_scaling", 1.0, move || {
        let drift_allowance = 2.0 * groups.g_tilde() * groups.theta;
        let mut worst: f64 = 0.0;
        let mut worst_flags = ModelFlags::canonical();
        for flags in &flag_variants() {
            let phi = propagate(flags, &groups, groups.theta, tol)?;
            let bound = if flags.backaction {
                100.0 * tol
            } else {
                100.0 * tol + drift_allowance
            };
            let ratio = phi.residual / bound;
            if ratio > worst {
                worst = ratio;
                worst_flags = *flags;
            }
        }
        Ok((
            worst,
            format!(
                "worst residual/bound over 4 flag variants at tol {tol:e} ({worst_flags:?}); \
                 one-way variants get a 2·g̃·θ = {drift_allowance:e} drift allowance"
            ),
        ))
    })]
}

/// Photon number from the propagated field block vs (n_th + ½)cosh(2rθ) − ½;
/// the field rows are autonomous with back-action off, so this holds at any
/// coupling. Vacuum-floor denominator keeps the measure finite at ⟨N⟩ = 0.
fn mean_n_decoupled(groups: &DimensionlessGroups, tol: f64) -> Vec<CheckResult> {
    let groups = *groups;
    vec![guard("mean_n_decoupled", 10.0 * tol, move || {
        let phi = propagate(&ModelFlags::canonical(), &groups, groups.theta, tol)?;
        let init = GaussianMoments::min_uncertainty(&groups)?;
        let report = kinetic_moments(&phi, &init, &groups)?;
        let closed = analytic::mean_photons(groups.r, groups.theta, groups.n_th)?;
        Ok((
            (report.mean_n - closed).abs() / (closed + 0.5),
            format!("|⟨N⟩_ode − ⟨N⟩_closed|/(⟨N⟩+½) at rθ = {}", groups.r * groups.theta),
        ))
    })]
}

/// Truncated-Fock photon number at a converged dimension vs the closed form,
/// at the configured occupancy (capped at 2) and squeeze phase (capped at 1).
fn fock_photon_law(groups: &DimensionlessGroups, fock_dim: Option<usize>) -> Vec<CheckResult> {
    let n_th = groups.n_th.min(2.0);
    let s = (groups.r * groups.theta).min(1.0);
    vec![guard("fock_photon_law", 1e-5, move || {
        let dims: Vec<usize> = match fock_dim {
            Some(d) => {
                let next = (d + 40).min(fock::MAX_DIM);
                if next > d {
                    vec![d, next]
                } else {
                    vec![d]
                }
            }
            None => (0..12).map(|k| fock::DEFAULT_DIM + 40 * k).collect(),
        };
        let reports = fock::convergence_scan(n_th, s, &dims)?;
        let closed = analytic::mean_photons(1.0, s, n_th)?;
        match reports.iter().find(|rep| rep.converged) {
            Some(rep) => Ok((
                (rep.mean_n - closed).abs(),
                format!("|⟨N⟩_fock − ⟨N⟩_closed| at n_th = {n_th}, λt = {s}, converged D = {}", rep.dim),
            )),
            None => Ok((
                f64::INFINITY,
                format!(
                    "no converged truncation in dims {dims:?} (last tail mass {:e})",
                    reports.last().map(|rep| rep.tail_mass).unwrap_or(f64::NAN)
                ),
            )),
        }
    })]
}

/// delta_k(n_th)/delta_k(0) = 1 + 2n_th to float precision.
fn thermal_enhancement() -> Vec<CheckResult> {
    vec![guard("thermal_enhancement", 1e-14, || {
        let rs = golden_points(100, 0.0, 0.3);
        let thetas = golden_points(100, 0.1, 4.0 * PI);
        let occupancies = [0.5, 1.0, 2.0, 5.0];
        let mut worst: f64 = 0.0;
        for (k, (&r, &theta)) in rs.iter().zip(&thetas).enumerate() {
            let n_th = occupancies[k % occupancies.len()];
            let base = analytic::mean_kinetic_shift(r, theta, 0.0, 1.0)?.delta_k;
            if base == 0.0 {
                continue;
            }
            let hot = analytic::mean_kinetic_shift(r, theta, n_th, 1.0)?.delta_k;
            let expect = 1.0 + 2.0 * n_th;
            worst = worst.max((hot / base - expect).abs() / expect);
        }
        Ok((worst, "max rel. deviation of delta_k(n_th)/delta_k(0) from 1+2n_th, 100 points".into()))
    })]
}

/// mean_photons(r, θ, n_th) + ½ = (n_th + ½)·cosh(2rθ).
fn photon_identity() -> Vec<CheckResult> {
    vec![guard("photon_identity", 1e-12, || {
        let args = golden_points(60, 0.0, 3.0);
        let occupancies = [0.0, 0.5, 1.0, 2.0, 5.0];
        let mut worst: f64 = 0.0;
        for (k, &s) in args.iter().enumerate() {
            let n_th = occupancies[k % occupancies.len()];
            let lhs = analytic::mean_photons(1.0, s, n_th)? + 0.5;
            let rhs = (n_th + 0.5) * (2.0 * s).cosh();
            worst = worst.max((lhs - rhs).abs() / rhs);
        }
        Ok((worst, "max rel. deviation of ⟨N⟩ + ½ from (n_th+½)cosh(2rθ), 60 points".into()))
    })]
}

/// mean_kinetic_shift at θ = πn equals resonant_shift(r, n).
fn resonant_identity() -> Vec<CheckResult> {
    vec![guard("resonant_identity", 1e-12, || {
        let mut worst: f64 = 0.0;
        for &r in &golden_points(30, 0.005, 0.3) {
            for n in 1..=6u32 {
                let theta = PI * f64::from(n);
                let general = analytic::mean_kinetic_shift(r, theta, 1.0, 1.0)?.delta_k;
                let resonant = analytic::resonant_shift(r, n, 1.0, 1.0)?.delta_k;
                worst = worst.max((general - resonant).abs() / resonant);
            }
        }
        Ok((worst, "max rel. difference of the general and resonant closed forms".into()))
    })]
}

/// Adaptive-Simpson quadrature of the kick integrands vs the closed forms:
/// c1 = (r²+4)·∫₀^θ e^{rt}cos 2t dt and c2 = (r²+4)·∫₀^θ e^{−rt}sin 2t dt.
fn kick_quadrature() -> Vec<CheckResult> {
    vec![guard("kick_quadrature", 1e-8, || {
        let rs = golden_points(20, 0.0, 0.3);
        let thetas = golden_points(20, 0.2, 4.0 * PI);
        let mut worst: f64 = 0.0;
        for (&r, &theta) in rs.iter().zip(&thetas) {
            let k = analytic::kick_coefficients(r, theta)?;
            let scale = r * r + 4.0;
            let i1 = simpson(&|t: f64| (r * t).exp() * (2.0 * t).cos(), 0.0, theta, 1e-11);
            let i2 = simpson(&|t: f64| (-r * t).exp() * (2.0 * t).sin(), 0.0, theta, 1e-11);
            worst = worst.max((k.c1 - scale * i1).abs() / (1.0 + k.c1.abs()));
            worst = worst.max((k.c2 - scale * i2).abs() / (1.0 + k.c2.abs()));
        }
        Ok((worst, "max quadrature-vs-closed-form error of (c1, c2), 20 parameter pairs".into()))
    })]
}

/// The weak-squeezing limit converges to the resonant closed form linearly
/// in rθ: |limit/exact − 1| ≈ rθ·(4 − r²)/(4 + r²).
fn small_squeeze_scaling() -> Vec<CheckResult> {
    vec![guard("small_squeeze_scaling", 1.2, || {
        let mut worst: f64 = 0.0;
        let mut details = Vec::new();
        for &s in &[0.08, 0.04, 0.02] {
            let r = s / PI;
            let limit = analytic::small_squeeze_limit(r, 1, 0.0, 1.0)?.delta_k;
            let exact = analytic::resonant_shift(r, 1, 0.0, 1.0)?.delta_k;
            let err = (limit / exact - 1.0).abs();
            details.push(format!("rθ = {s}: err = {err:.3e}"));
            worst = worst.max(err / s);
        }
        Ok((worst, format!("max |limit/exact − 1|/rθ; {}", details.join(", "))))
    })]
}

/// Measured variance-shift ratios (oracle/closed-form) on the 10×10 grid with
/// the narrow-momentum preset; points whose shape function is below the floor
/// are skipped. Returns (ratios, skipped count).
pub fn variance_ratio_grid() -> Result<(Vec<f64>, usize)> {
    let mut points = Vec::new();
    for r in linspace(0.02, 0.2, 10) {
        for theta in linspace(0.4, 11.9, 10) {
            points.push((r, theta));
        }
    }
    let computed: Vec<Option<f64>> = exec::map_indexed(&points, |&(r, theta)| {
        let groups = DimensionlessGroups::bare(r, theta, 0.0, VAR_G_TILDE, VAR_P0, 1.0);
        let closed = analytic::variance_shift_paper(r, theta, 0.0, groups.eps_kick, groups.k0)?;
        let shape = analytic::mean_kinetic_shift(r, theta, 0.0, groups.eps_kick)?.f;
        if shape < MIN_SHAPE_F {
            return Ok(None);
        }
        let flags = ModelFlags::canonical();
        let init = GaussianMoments::narrow_momentum(&groups, VAR_SIGMA_P)?;
        let base = kinetic_moments(&TransferMatrix::identity(flags), &init, &groups)?;
        let phi = propagate(&flags, &groups, theta, GRID_TOL)?;
        let report = kinetic_moments(&phi, &init, &groups)?;
        let ratio = closed
            .with_oracle(report.var_k - base.var_k)
            .dvar_oracle_ratio
            .expect("nonzero closed-form variance shift");
        Ok(Some(ratio))
    })
    .into_iter()
    .collect::<Result<_>>()?;
    let kept: Vec<f64> = computed.into_iter().flatten().collect();
    if kept.is_empty() {
        return Err(Error::Range(
            "every variance grid point fell below the shape-function floor".into(),
        ));
    }
    let skipped = points.len() - kept.len();
    Ok((kept, skipped))
}

/// Variance-shift ratio between the Gaussian-moment oracle and the closed
/// form on a 10×10 grid with the narrow-momentum preset: asserts the ratio is
/// constant to 1% and records its value separately.
fn variance_ratio() -> Vec<CheckResult> {
    let grid = variance_ratio_grid();
    let constancy = guard("variance_ratio_constancy", 0.01, || {
        let (ratios, skipped) = grid.as_ref().map_err(Clone::clone)?;
        let mean = ratios.iter().sum::<f64>() / ratios.len() as f64;
        let max = ratios.iter().cloned().fold(f64::MIN, f64::max);
        let min = ratios.iter().cloned().fold(f64::MAX, f64::min);
        Ok((
            (max - min) / mean,
            format!(
                "ratio spread over {} grid points ({skipped} below f = {MIN_SHAPE_F} skipped)",
                ratios.len()
            ),
        ))
    });
    let value = guard("variance_ratio_value", f64::INFINITY, || {
        let (ratios, _) = grid.as_ref().map_err(Clone::clone)?;
        Ok((
            ratios.iter().sum::<f64>() / ratios.len() as f64,
            "measured (oracle variance shift)/(closed-form variance shift); recorded, not asserted"
                .into(),
        ))
    });
    vec![constancy, value]
}

/// Adaptive Simpson quadrature with interval-halving error control.
fn simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64, eps: f64) -> f64 {
    #[allow(clippy::too_many_arguments)]
    fn recurse(
        f: &dyn Fn(f64) -> f64,
        a: f64,
        m: f64,
        b: f64,
        fa: f64,
        fm: f64,
        fb: f64,
        whole: f64,
        eps: f64,
        depth: u32,
    ) -> f64 {
        let lm = 0.5 * (a + m);
        let rm = 0.5 * (m + b);
        let flm = f(lm);
        let frm = f(rm);
        let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
        let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
        let delta = left + right - whole;
        if depth == 0 || delta.abs() <= 15.0 * eps {
            left + right + delta / 15.0
        } else {
            recurse(f, a, lm, m, fa, flm, fm, left, 0.5 * eps, depth - 1)
                + recurse(f, m, rm, b, fm, frm, fb, right, 0.5 * eps, depth - 1)
        }
    }
    let m = 0.5 * (a + b);
    let (fa, fm, fb) = (f(a), f(m), f(b));
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    recurse(f, a, m, b, fa, fm, fb, whole, eps, 40)
}
