//! Plot-generation contracts: valid self-contained documents, degenerate
//! single-marker plots, monotone polylines for monotone data, gray error
//! cells, and rejection of empty selections.

use dce_cli::commands::{AnalyticPoint, SweepRow};
use dce_cli::config::{SweepAxis, SweepParam, SweepSpec};
use dce_cli::svg::emit_svg;

fn point(delta_k: f64) -> AnalyticPoint {
    AnalyticPoint {
        r: 0.05,
        theta: 1.0,
        n_th: 0.0,
        eps_kick: 1e-40,
        delta_k,
        f: delta_k / 1e-40,
        dvar_paper: 3e-17 * delta_k,
        mean_n: 0.1,
        snr: 1e-13,
    }
}

fn line_spec(count: usize) -> SweepSpec {
    SweepSpec {
        axis1: SweepAxis { param: SweepParam::Theta, min: 0.0, max: 1.0, count },
        axis2: None,
    }
}

fn ok_row(x: f64, delta_k: f64) -> SweepRow {
    SweepRow { axis_values: vec![x], point: Ok(point(delta_k)) }
}

#[test]
fn single_data_point_renders_one_marker() {
    let rows = vec![ok_row(0.5, 2e-41)];
    let doc = emit_svg(&line_spec(2), &rows, "delta_k", "[cavity]\nomega = 1e0\n")
        .expect("single point renders");
    assert!(doc.starts_with("<svg "));
    assert!(doc.trim_end().ends_with("</svg>"));
    assert!(doc.contains("<circle "), "degenerate plot uses a marker:\n{doc}");
    assert!(!doc.contains("<polyline"), "no polyline for a single point");
    assert!(doc.contains("theta [rad]"), "axis label present");
}

#[test]
fn monotone_data_gives_monotone_polyline_y_coordinates() {
    let rows: Vec<SweepRow> = (0..8)
        .map(|k| ok_row(k as f64 / 7.0, 1e-42 * (k + 1) as f64))
        .collect();
    let doc = emit_svg(&line_spec(8), &rows, "delta_k", "").expect("renders");
    let points_attr = doc
        .split("points=\"")
        .nth(1)
        .expect("polyline present")
        .split('"')
        .next()
        .expect("attribute closed");
    let ys: Vec<f64> = points_attr
        .split(' ')
        .map(|pair| pair.split(',').nth(1).expect("y coord").parse().expect("float"))
        .collect();
    assert_eq!(ys.len(), 8);
    // Increasing data means decreasing SVG y (origin is the top-left corner).
    for pair in ys.windows(2) {
        assert!(pair[1] < pair[0], "non-monotone ys: {ys:?}");
    }
}

#[test]
fn identical_input_gives_identical_bytes() {
    let rows: Vec<SweepRow> = (0..5).map(|k| ok_row(k as f64 / 4.0, 1e-42)).collect();
    let a = emit_svg(&line_spec(5), &rows, "delta_k", "echo").expect("renders");
    let b = emit_svg(&line_spec(5), &rows, "delta_k", "echo").expect("renders");
    assert_eq!(a, b);
    // Flat data still renders with a nonzero vertical scale.
    assert!(a.contains("<polyline"));
}

#[test]
fn empty_selections_are_rejected() {
    let spec = line_spec(2);
    let err = emit_svg(&spec, &[], "delta_k", "").expect_err("no rows");
    assert!(err.contains("no rows"), "error: {err}");
    let all_failed = vec![SweepRow { axis_values: vec![0.0], point: Err("x".into()) }];
    let err = emit_svg(&spec, &all_failed, "delta_k", "").expect_err("no finite values");
    assert!(err.contains("no finite"), "error: {err}");
    let rows = vec![ok_row(0.0, 1e-42)];
    let err = emit_svg(&spec, &rows, "", "").expect_err("no quantity");
    assert!(err.contains("no output quantity"), "error: {err}");
}

#[test]
fn heatmap_marks_failed_cells_gray() {
    let spec = SweepSpec {
        axis1: SweepAxis { param: SweepParam::R, min: 0.0, max: 0.1, count: 2 },
        axis2: Some(SweepAxis { param: SweepParam::NTh, min: 0.0, max: 1.0, count: 2 }),
    };
    let rows = vec![
        SweepRow { axis_values: vec![0.0, 0.0], point: Ok(point(1e-42)) },
        SweepRow { axis_values: vec![0.0, 1.0], point: Ok(point(2e-42)) },
        SweepRow { axis_values: vec![0.1, 0.0], point: Ok(point(3e-42)) },
        SweepRow { axis_values: vec![0.1, 1.0], point: Err("bad".into()) },
    ];
    let doc = emit_svg(&spec, &rows, "delta_k", "").expect("renders");
    assert_eq!(doc.matches("<rect ").count(), 5, "background + 4 cells:\n{doc}");
    assert!(doc.contains("#808080"), "failed cell is gray:\n{doc}");
    assert!(doc.contains("n_th (dimensionless)"), "second axis labeled");
    // Hyphen runs never appear inside the XML comment.
    let comment = doc.split("<!--").nth(1).expect("comment").split("-->").next().expect("closed");
    assert!(!comment.contains("--"), "comment body must stay XML-safe");
}

#[test]
fn config_echo_is_embedded_as_a_comment() {
    let rows = vec![ok_row(0.0, 1e-42), ok_row(1.0, 2e-42)];
    let echo = "[cavity]\nomega = 1e10\n# trailing -- dashes";
    let doc = emit_svg(&line_spec(2), &rows, "delta_k", echo).expect("renders");
    assert!(doc.contains("omega = 1e10"), "echo embedded:\n{doc}");
    assert!(!doc.split("<!--").nth(1).expect("comment").split("-->").next().expect("closed").contains("--"));
}
