//! The four commands. Each prints a deterministic report to stdout and
//! optionally writes CSV/SVG artifacts; all physics comes from the engine
//! crate, so commands are orchestration only.

use std::fmt;

use dce_core::analytic;
use dce_core::checks;
use dce_core::exec;
use dce_core::params::{
    reduce_with_occupancy, CavityConfig, DimensionlessGroups, ElectronConfig, PhysicalConstants,
};
use dce_core::propagator::{kinetic_moments, propagate, GaussianMoments, TransferMatrix};

use crate::config::{RunConfig, SweepAxis, SweepParam};
use crate::csv;
use crate::svg;

/// Command-level failure, mapped onto the exit-code contract:
/// configuration/input problems exit 2, physics/check failures exit 1.
#[derive(Debug)]
pub enum CliError {
    Config(String),
    Io(String),
    Physics(dce_core::Error),
    ChecksFailed(Vec<&'static str>),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) | CliError::Io(_) => 2,
            CliError::Physics(_) | CliError::ChecksFailed(_) => 1,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config(msg) => write!(f, "config error: {msg}"),
            CliError::Io(msg) => write!(f, "io error: {msg}"),
            CliError::Physics(e) => write!(f, "physics error: {e}"),
            CliError::ChecksFailed(names) => {
                write!(f, "checks failed: {}", names.join(", "))
            }
        }
    }
}

impl From<dce_core::Error> for CliError {
    fn from(e: dce_core::Error) -> Self {
        CliError::Physics(e)
    }
}

const CONSTS: PhysicalConstants = PhysicalConstants::codata();

fn groups_of(config: &RunConfig) -> Result<DimensionlessGroups, CliError> {
    Ok(reduce_with_occupancy(
        &config.cavity,
        &config.electron,
        &CONSTS,
        config.n_th_override,
    )?)
}

/// Analytic outputs at one parameter point.
#[derive(Debug, Clone, Copy)]
pub struct AnalyticPoint {
    pub r: f64,
    pub theta: f64,
    pub n_th: f64,
    pub eps_kick: f64,
    pub delta_k: f64,
    pub f: f64,
    pub dvar_paper: f64,
    pub mean_n: f64,
    pub snr: f64,
}

fn analytic_point(groups: &DimensionlessGroups) -> Result<AnalyticPoint, CliError> {
    let shift = analytic::mean_kinetic_shift(groups.r, groups.theta, groups.n_th, groups.eps_kick)?;
    let var = analytic::variance_shift_paper(
        groups.r,
        groups.theta,
        groups.n_th,
        groups.eps_kick,
        groups.k0,
    )?;
    let mean_n = analytic::mean_photons(groups.r, groups.theta, groups.n_th)?;
    let snr = if var.dvar_paper > 0.0 {
        shift.delta_k / var.dvar_paper.sqrt()
    } else {
        0.0
    };
    Ok(AnalyticPoint {
        r: groups.r,
        theta: groups.theta,
        n_th: groups.n_th,
        eps_kick: groups.eps_kick,
        delta_k: shift.delta_k,
        f: shift.f,
        dvar_paper: var.dvar_paper,
        mean_n,
        snr,
    })
}

/// Single-point closed-form evaluation; prints and optionally writes one CSV row.
pub fn cmd_analytic(config: &RunConfig) -> Result<(), CliError> {
    let groups = groups_of(config)?;
    let point = analytic_point(&groups)?;
    println!("r = {:e}", point.r);
    println!("theta = {:e}", point.theta);
    println!("n_th = {:e}", point.n_th);
    println!("eps_kick = {:e} J", point.eps_kick);
    println!("delta_k = {:e} J", point.delta_k);
    println!("f = {:e}", point.f);
    println!("dvar_paper = {:e} J^2", point.dvar_paper);
    println!("mean_n = {:e}", point.mean_n);
    println!("snr = {:e}", point.snr);
    if let Some(path) = &config.csv_out {
        let table = csv::Table::single(&config.echo(), point);
        csv::write_file(path, &table)?;
        println!("csv written to {path}");
    }
    Ok(())
}

/// Propagate the configured system once and report moments with deviations
/// from the closed forms.
pub fn cmd_simulate(config: &RunConfig) -> Result<(), CliError> {
    let groups = groups_of(config)?;
    let phi = propagate(&config.flags, &groups, groups.theta, config.tol)?;
    let init = GaussianMoments::min_uncertainty(&groups)?;
    let report = kinetic_moments(&phi, &init, &groups)?;
    let base = kinetic_moments(&TransferMatrix::identity(config.flags), &init, &groups)?;
    let closed_shift =
        analytic::mean_kinetic_shift(groups.r, groups.theta, groups.n_th, groups.eps_kick)?;
    let closed_n = analytic::mean_photons(groups.r, groups.theta, groups.n_th)?;
    let delta_k_ode = report.mean_k - base.mean_k;
    let frame = match report.flags.frame {
        dce_core::propagator::Frame::Rotating => "rotating",
        dce_core::propagator::Frame::Lab => "lab",
    };
    println!(
        "flags = rwa={} backaction={} frame={}",
        report.flags.rwa, report.flags.backaction, frame
    );
    println!("theta = {:e}", groups.theta);
    println!("mean_k = {:e} J", report.mean_k);
    println!("var_k = {:e} J^2", report.var_k);
    println!("mean_n = {:e}", report.mean_n);
    println!("commutator_residual = {:e}", report.commutator_residual);
    println!("delta_k_ode = {:e} J", delta_k_ode);
    println!("delta_k_closed = {:e} J", closed_shift.delta_k);
    // Kick-scale deviation: |ΔK_ode − ΔK_closed| relative to the kick unit.
    let kick_unit = groups.eps_kick * (1.0 + 2.0 * groups.n_th);
    println!(
        "deviation_delta_k = {:e} (kick units)",
        (delta_k_ode - closed_shift.delta_k).abs() / kick_unit
    );
    println!(
        "deviation_mean_n = {:e}",
        (report.mean_n - closed_n).abs() / (closed_n + 0.5)
    );
    // Resolution floor of the f64 energy bookkeeping at this K₀ scale; ODE
    // kick shifts below it are rounded into the baseline energy.
    println!(
        "float_resolution_floor = {:e} (kick units)",
        ulp(report.mean_k) / kick_unit
    );
    Ok(())
}

fn ulp(x: f64) -> f64 {
    let next = f64::from_bits(x.abs().to_bits() + 1);
    next - x.abs()
}

/// Run the named cross-validation checks; exit nonzero if any fails.
pub fn cmd_validate(config: &RunConfig) -> Result<(), CliError> {
    let groups = groups_of(config)?;
    let results = exec::with_workers(config.workers, || {
        checks::run_all(&groups, config.tol, config.fock_dim)
    })?;
    let mut failing: Vec<&'static str> = Vec::new();
    for check in &results {
        let status = if check.passed { "PASS" } else { "FAIL" };
        println!(
            "CHECK {} {} measured={:e} bound={:e} :: {}",
            check.name, status, check.measured, check.bound, check.detail
        );
        if !check.passed {
            failing.push(check.name);
        }
    }
    println!(
        "checks: {} passed, {} failed",
        results.len() - failing.len(),
        failing.len()
    );
    if !failing.is_empty() {
        return Err(CliError::ChecksFailed(failing));
    }
    Ok(())
}

/// One evaluated sweep row: axis indices and values plus the outputs or an
/// error message.
#[derive(Debug, Clone)]
pub struct SweepRow {
    pub axis_values: Vec<f64>,
    pub point: Result<AnalyticPoint, String>,
}

fn apply_axis(
    cavity: &mut CavityConfig,
    electron: &mut ElectronConfig,
    n_th: &mut Option<f64>,
    axis: &SweepAxis,
    value: f64,
) {
    match axis.param {
        SweepParam::R => cavity.lambda_sq = value * cavity.omega,
        SweepParam::Theta => electron.flight_length = value * electron.v0 / cavity.omega,
        SweepParam::NTh => *n_th = Some(value),
        SweepParam::Temperature => {
            cavity.temperature = value;
            // An occupancy override would mask the swept temperature.
            *n_th = None;
        }
        SweepParam::V0 => electron.v0 = value,
        SweepParam::L => electron.flight_length = value,
    }
}

/// Evaluate the closed-form outputs over the configured grid, deterministically.
pub fn sweep_rows(config: &RunConfig) -> Result<Vec<SweepRow>, CliError> {
    let sweep = config
        .sweep
        .as_ref()
        .ok_or_else(|| CliError::Config("sweep command needs a [sweep] section".into()))?;
    let mut tasks: Vec<Vec<f64>> = Vec::new();
    match &sweep.axis2 {
        Some(axis2) => {
            for i in 0..sweep.axis1.count {
                for j in 0..axis2.count {
                    tasks.push(vec![sweep.axis1.value(i), axis2.value(j)]);
                }
            }
        }
        None => {
            for i in 0..sweep.axis1.count {
                tasks.push(vec![sweep.axis1.value(i)]);
            }
        }
    }
    let axes: Vec<SweepAxis> = std::iter::once(sweep.axis1)
        .chain(sweep.axis2)
        .collect();
    let base_cavity = config.cavity;
    let base_electron = config.electron;
    let base_n_th = config.n_th_override;
    let rows = exec::with_workers(config.workers, || {
        exec::map_indexed(&tasks, |values| {
            let mut cavity = base_cavity;
            let mut electron = base_electron;
            let mut n_th = base_n_th;
            for (axis, &value) in axes.iter().zip(values.iter()) {
                apply_axis(&mut cavity, &mut electron, &mut n_th, axis, value);
            }
            let point = reduce_with_occupancy(&cavity, &electron, &CONSTS, n_th)
                .map_err(|e| e.to_string())
                .and_then(|groups| analytic_point(&groups).map_err(|e| e.to_string()));
            SweepRow { axis_values: values.clone(), point }
        })
    })?;
    Ok(rows)
}

/// Grid evaluation to CSV (and optional SVG plot of one output column).
pub fn cmd_sweep(config: &RunConfig) -> Result<(), CliError> {
    let sweep = config
        .sweep
        .ok_or_else(|| CliError::Config("sweep command needs a [sweep] section".into()))?;
    let echo = config.echo();
    let rows = sweep_rows(config)?;
    let table = csv::Table::from_rows(&echo, &sweep, &rows);
    let csv_path = config.csv_out.clone().ok_or_else(|| {
        CliError::Config("sweep needs an output CSV path ([output] csv or --out)".into())
    })?;
    csv::write_file(&csv_path, &table)?;
    println!("csv written to {csv_path} ({} rows)", rows.len());
    if let Some(svg_path) = &config.svg_out {
        let doc =
            svg::emit_svg(&sweep, &rows, &config.quantity, &echo).map_err(CliError::Config)?;
        std::fs::write(svg_path, doc)
            .map_err(|e| CliError::Io(format!("cannot write {svg_path}: {e}")))?;
        println!("svg written to {svg_path}");
    }
    Ok(())
}
