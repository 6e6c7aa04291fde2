//! End-to-end binary behavior: exit codes, deterministic output, CSV
//! contents, and the forced-failure validation paths.

use std::io::Write as _;
use std::path::Path;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_dce"))
}

fn write_config(dir: &Path, name: &str, body: &str) -> String {
    let path = dir.join(name);
    let mut file = std::fs::File::create(&path).expect("create config");
    file.write_all(body.as_bytes()).expect("write config");
    path.to_str().expect("utf-8 path").to_string()
}

const BASE: &str = r#"
[cavity]
omega = 6.283185307179586e10
volume = 5e-3
lambda_sq = 3.141592653589793e9

[electron]
v0 = 1e7
sigma_x = 1e-6
flight_length = 2e-3
"#;

fn stdout_of(output: &Output) -> String {
    String::from_utf8(output.stdout.clone()).expect("utf-8 stdout")
}

fn stderr_of(output: &Output) -> String {
    String::from_utf8(output.stderr.clone()).expect("utf-8 stderr")
}

/// Pull `name = <float>` out of a key=value report.
fn field(report: &str, name: &str) -> f64 {
    let prefix = format!("{name} = ");
    report
        .lines()
        .find_map(|line| line.strip_prefix(&prefix))
        .unwrap_or_else(|| panic!("no field {name} in:\n{report}"))
        .split_whitespace()
        .next()
        .expect("value token")
        .parse()
        .unwrap_or_else(|e| panic!("unparseable {name}: {e}"))
}

#[test]
fn analytic_is_deterministic_and_null_at_the_resonant_point() {
    let dir = tempfile::tempdir().expect("tempdir");
    // flight_length = π·v0/ω puts the transit phase exactly on the null.
    let config = write_config(
        dir.path(),
        "null.toml",
        &BASE
            .replace("lambda_sq = 3.141592653589793e9", "lambda_sq = 0.0")
            .replace("flight_length = 2e-3", "flight_length = 5e-4"),
    );
    let first = bin().args(["analytic", "--config", &config]).output().expect("run");
    assert!(first.status.success(), "stderr: {}", stderr_of(&first));
    let report = stdout_of(&first);
    let theta = field(&report, "theta");
    assert!((theta - std::f64::consts::PI).abs() < 1e-12, "theta = {theta}");
    let delta_k = field(&report, "delta_k");
    let eps_kick = field(&report, "eps_kick");
    assert!(delta_k.abs() <= 1e-12 * eps_kick, "delta_k = {delta_k:e}");

    let second = bin().args(["analytic", "--config", &config]).output().expect("run");
    assert_eq!(first.stdout, second.stdout, "same config must give identical bytes");
}

#[test]
fn thermal_occupancy_scales_the_kick_by_one_plus_twice_n() {
    let dir = tempfile::tempdir().expect("tempdir");
    let cold = write_config(dir.path(), "cold.toml", BASE);
    let warm = write_config(
        dir.path(),
        "warm.toml",
        &BASE.replace("volume = 5e-3", "volume = 5e-3\nn_th = 1.0"),
    );
    let cold_out = bin().args(["analytic", "--config", &cold]).output().expect("run");
    let warm_out = bin().args(["analytic", "--config", &warm]).output().expect("run");
    let cold_dk = field(&stdout_of(&cold_out), "delta_k");
    let warm_dk = field(&stdout_of(&warm_out), "delta_k");
    let ratio = warm_dk / cold_dk;
    assert!((ratio - 3.0).abs() < 1e-13, "ratio = {ratio}");
}

#[test]
fn simulate_reports_moments_and_exits_cleanly() {
    let dir = tempfile::tempdir().expect("tempdir");
    let config = write_config(dir.path(), "sim.toml", BASE);
    let output = bin().args(["simulate", "--config", &config]).output().expect("run");
    assert!(output.status.success(), "stderr: {}", stderr_of(&output));
    let report = stdout_of(&output);
    let residual = field(&report, "commutator_residual");
    assert!(residual < 1e-6, "residual = {residual:e}");
    // K₀ = ½·m·v₀² for the configured beam.
    let mean_k = field(&report, "mean_k");
    assert!((mean_k / 4.5546918507500006e-17 - 1.0).abs() < 1e-9, "mean_k = {mean_k:e}");
}

#[test]
fn simulate_surfaces_integrator_domain_errors_as_exit_one() {
    let dir = tempfile::tempdir().expect("tempdir");
    // r·θ ≈ 628 exceeds the squeeze-argument range the integrator accepts.
    let config = write_config(
        dir.path(),
        "blowup.toml",
        &BASE.replace("flight_length = 2e-3", "flight_length = 2.0"),
    );
    let output = bin().args(["simulate", "--config", &config]).output().expect("run");
    assert_eq!(output.status.code(), Some(1), "stderr: {}", stderr_of(&output));
    assert!(stderr_of(&output).contains("physics error"), "stderr: {}", stderr_of(&output));
}

#[test]
fn validate_passes_on_the_default_configuration() {
    let dir = tempfile::tempdir().expect("tempdir");
    let config = write_config(dir.path(), "ok.toml", BASE);
    let output = bin().args(["validate", "--config", &config]).output().expect("run");
    assert_eq!(output.status.code(), Some(0), "stderr: {}", stderr_of(&output));
    let report = stdout_of(&output);
    for line in report.lines().filter(|l| l.starts_with("CHECK ")) {
        assert!(line.contains(" PASS "), "unexpected failure line: {line}");
        assert!(line.contains("measured="), "missing measurement: {line}");
        assert!(line.contains("bound="), "missing bound: {line}");
    }
    assert!(report.contains("CHECK vacuum_shape PASS"), "report:\n{report}");
    assert!(report.contains(", 0 failed"), "report:\n{report}");
}

#[test]
fn loosened_tolerance_makes_validate_fail_with_exit_one() {
    let dir = tempfile::tempdir().expect("tempdir");
    let config = write_config(dir.path(), "loose.toml", BASE);
    let output = bin()
        .args(["validate", "--config", &config, "--tol", "1e-4"])
        .output()
        .expect("run");
    assert_eq!(output.status.code(), Some(1));
    let report = stdout_of(&output);
    assert!(
        report.contains("CHECK commutator_residual FAIL"),
        "report:\n{report}"
    );
    assert!(
        stderr_of(&output).contains("commutator_residual"),
        "stderr: {}",
        stderr_of(&output)
    );
}

#[test]
fn undersized_fock_ladder_makes_validate_fail_with_exit_one() {
    let dir = tempfile::tempdir().expect("tempdir");
    let config = write_config(
        dir.path(),
        "smallfock.toml",
        &BASE.replace("[electron]", "[run]\nfock_dim = 4\n\n[electron]"),
    );
    let output = bin().args(["validate", "--config", &config]).output().expect("run");
    assert_eq!(output.status.code(), Some(1));
    let report = stdout_of(&output);
    assert!(report.contains("CHECK fock_photon_law FAIL"), "report:\n{report}");
}

#[test]
fn config_problems_exit_two() {
    let dir = tempfile::tempdir().expect("tempdir");
    // Unknown key.
    let bad_key = write_config(
        dir.path(),
        "badkey.toml",
        &BASE.replace("lambda_sq", "lamda"),
    );
    let output = bin().args(["analytic", "--config", &bad_key]).output().expect("run");
    assert_eq!(output.status.code(), Some(2));
    assert!(stderr_of(&output).contains("did you mean \"lambda_sq\"?"));
    // Missing file.
    let missing = dir.path().join("missing.toml");
    let output = bin()
        .args(["analytic", "--config", missing.to_str().expect("utf-8")])
        .output()
        .expect("run");
    assert_eq!(output.status.code(), Some(2));
    // Unknown subcommand is a usage error.
    let output = bin().args(["frobnicate"]).output().expect("run");
    assert_eq!(output.status.code(), Some(2));
    // Sweep without a [sweep] section.
    let no_sweep = write_config(dir.path(), "nosweep.toml", BASE);
    let output = bin().args(["sweep", "--config", &no_sweep]).output().expect("run");
    assert_eq!(output.status.code(), Some(2));
}

#[test]
fn redundant_occupancy_settings_warn_on_stderr() {
    let dir = tempfile::tempdir().expect("tempdir");
    let config = write_config(
        dir.path(),
        "both.toml",
        &BASE.replace(
            "temperature = 0.0",
            "",
        )
        .replace("volume = 5e-3", "volume = 5e-3\ntemperature = 1.0\nn_th = 2.0"),
    );
    let output = bin().args(["analytic", "--config", &config]).output().expect("run");
    assert!(output.status.success(), "stderr: {}", stderr_of(&output));
    assert!(stderr_of(&output).contains("n_th wins"), "stderr: {}", stderr_of(&output));
    let n_th = field(&stdout_of(&output), "n_th");
    assert_eq!(n_th, 2.0);
}

fn sweep_config(dir: &Path, csv: &Path) -> String {
    write_config(
        dir,
        "sweep.toml",
        &format!(
            r#"{}
[sweep.axis1]
param = "theta"
min = 0.5
max = 6.0
count = 12

[output]
csv = {:?}
"#,
            BASE.replace("lambda_sq = 3.141592653589793e9", "lambda_sq = 0.0"),
            csv.to_str().expect("utf-8 csv path")
        ),
    )
}

/// Data rows of a rendered CSV (skipping '#' metadata and the header).
fn data_rows(csv_text: &str) -> Vec<Vec<String>> {
    csv_text
        .lines()
        .filter(|l| !l.starts_with('#'))
        .skip(1)
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect()
}

#[test]
fn theta_sweep_at_zero_squeezing_traces_the_vacuum_shape() {
    let dir = tempfile::tempdir().expect("tempdir");
    let csv_path = dir.path().join("out.csv");
    let config = sweep_config(dir.path(), &csv_path);
    let output = bin().args(["sweep", "--config", &config]).output().expect("run");
    assert!(output.status.success(), "stderr: {}", stderr_of(&output));
    let text = std::fs::read_to_string(&csv_path).expect("read csv");
    // Header names the axis and keeps the fixed column order.
    let header = text
        .lines()
        .find(|l| !l.starts_with('#'))
        .expect("header line");
    assert_eq!(
        header,
        "axis1_theta,r,theta,n_th,eps_kick [J],delta_k [J],f,dvar_paper [J²],mean_n,snr,error"
    );
    let rows = data_rows(&text);
    assert_eq!(rows.len(), 12);
    for row in &rows {
        let theta: f64 = row[2].parse().expect("theta");
        let eps: f64 = row[4].parse().expect("eps");
        let delta_k: f64 = row[5].parse().expect("delta_k");
        let expected = eps * theta.sin().powi(2);
        assert!(
            (delta_k - expected).abs() <= 1e-12 * eps,
            "delta_k {delta_k:e} vs sin²θ prediction {expected:e}"
        );
        assert!(row[10].is_empty(), "unexpected error cell: {row:?}");
    }
    // The config echo is embedded above the header.
    assert!(text.starts_with("# resolved configuration:\n"));
    assert!(text.contains("# param = \"theta\"\n"));
}

#[test]
fn sweep_grid_rows_are_complete_and_in_axis_order() {
    let dir = tempfile::tempdir().expect("tempdir");
    let csv_path = dir.path().join("grid.csv");
    let config = write_config(
        dir.path(),
        "grid.toml",
        &format!(
            r#"{BASE}
[sweep.axis1]
param = "r"
min = 0.0
max = 0.1
count = 2

[sweep.axis2]
param = "n_th"
min = 0.0
max = 1.0
count = 2

[output]
csv = {:?}
"#,
            csv_path.to_str().expect("utf-8 csv path")
        ),
    );
    let output = bin().args(["sweep", "--config", &config]).output().expect("run");
    assert!(output.status.success(), "stderr: {}", stderr_of(&output));
    let text = std::fs::read_to_string(&csv_path).expect("read csv");
    let rows = data_rows(&text);
    assert_eq!(rows.len(), 4, "2×2 grid must give 4 rows");
    let firsts: Vec<f64> = rows.iter().map(|r| r[0].parse().expect("axis1")).collect();
    let seconds: Vec<f64> = rows.iter().map(|r| r[1].parse().expect("axis2")).collect();
    assert_eq!(firsts, vec![0.0, 0.0, 0.1, 0.1], "axis1-major order");
    assert_eq!(seconds, vec![0.0, 1.0, 0.0, 1.0], "axis2 cycles fastest");
}

#[test]
fn sweep_bytes_are_identical_across_worker_counts() {
    let dir = tempfile::tempdir().expect("tempdir");
    let csv_path = dir.path().join("workers.csv");
    let config = sweep_config(dir.path(), &csv_path);
    let mut outputs: Vec<Vec<u8>> = Vec::new();
    for workers in ["1", "4", "8"] {
        let output = bin()
            .args(["sweep", "--config", &config, "--workers", workers])
            .output()
            .expect("run");
        assert!(output.status.success(), "stderr: {}", stderr_of(&output));
        outputs.push(std::fs::read(&csv_path).expect("read csv"));
    }
    assert_eq!(outputs[0], outputs[1], "1 vs 4 workers");
    assert_eq!(outputs[0], outputs[2], "1 vs 8 workers");
}

#[test]
fn sweep_records_per_row_failures_without_aborting() {
    let dir = tempfile::tempdir().expect("tempdir");
    let csv_path = dir.path().join("partial.csv");
    // r up to 30 at θ ≈ 12.6 exceeds the closed-form squeeze range r·θ ≤ 300
    // for the upper rows only.
    let config = write_config(
        dir.path(),
        "partial.toml",
        &format!(
            r#"{BASE}
[sweep.axis1]
param = "r"
min = 0.05
max = 30.0
count = 3

[output]
csv = {:?}
"#,
            csv_path.to_str().expect("utf-8 csv path")
        ),
    );
    let output = bin().args(["sweep", "--config", &config]).output().expect("run");
    assert!(output.status.success(), "stderr: {}", stderr_of(&output));
    let text = std::fs::read_to_string(&csv_path).expect("read csv");
    let rows = data_rows(&text);
    assert_eq!(rows.len(), 3);
    assert!(rows[0][10].is_empty(), "first row should succeed: {:?}", rows[0]);
    let failed = &rows[2];
    assert!(!failed[10].is_empty(), "last row should fail: {failed:?}");
    assert!(!failed[10].contains(','), "error cell must stay one CSV cell");
    assert!(failed[5].is_empty(), "failed rows carry no outputs: {failed:?}");
}

#[test]
fn sweep_svg_is_written_and_deterministic() {
    let dir = tempfile::tempdir().expect("tempdir");
    let csv_path = dir.path().join("plot.csv");
    let svg_path = dir.path().join("plot.svg");
    let config = sweep_config(dir.path(), &csv_path);
    let svg_arg = svg_path.to_str().expect("utf-8 svg path");
    let mut docs: Vec<Vec<u8>> = Vec::new();
    for _ in 0..2 {
        let output = bin()
            .args(["sweep", "--config", &config, "--svg", svg_arg])
            .output()
            .expect("run");
        assert!(output.status.success(), "stderr: {}", stderr_of(&output));
        docs.push(std::fs::read(&svg_path).expect("read svg"));
    }
    assert_eq!(docs[0], docs[1], "fixed input must give identical SVG bytes");
    let doc = String::from_utf8(docs.pop().expect("doc")).expect("utf-8 svg");
    assert!(doc.starts_with("<svg "), "doc head: {}", &doc[..40.min(doc.len())]);
    assert!(doc.trim_end().ends_with("</svg>"));
    assert!(doc.contains("<polyline"), "1-axis sweep plots a polyline");
    assert!(doc.contains("theta [rad]"), "x-axis label present");
    assert!(doc.contains("delta_k [J]"), "quantity label present");
}
