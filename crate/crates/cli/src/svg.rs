//! Hand-rolled single-panel SVG plots: a polyline for one swept axis, a
//! heatmap for two. Output is a pure function of the rows, so fixed input
//! gives byte-identical documents.

use std::fmt::Write;

use crate::commands::{AnalyticPoint, SweepRow};
use crate::config::{SweepParam, SweepSpec};

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 480.0;
const LEFT: f64 = 80.0;
const RIGHT: f64 = 20.0;
const TOP: f64 = 40.0;
const BOTTOM: f64 = 60.0;

/// Low/high endpoints of the heatmap color ramp (dark violet → yellow).
const RAMP_LO: [f64; 3] = [68.0, 1.0, 84.0];
const RAMP_HI: [f64; 3] = [253.0, 231.0, 37.0];
const ERROR_FILL: &str = "#808080";

fn axis_label(param: SweepParam) -> &'static str {
    match param {
        SweepParam::R => "r (dimensionless)",
        SweepParam::Theta => "theta [rad]",
        SweepParam::NTh => "n_th (dimensionless)",
        SweepParam::Temperature => "temperature [K]",
        SweepParam::V0 => "v0 [m/s]",
        SweepParam::L => "L [m]",
    }
}

fn quantity_label(quantity: &str) -> String {
    match quantity {
        "delta_k" => "delta_k [J]".to_string(),
        "dvar_paper" => "dvar_paper [J²]".to_string(),
        other => format!("{other} (dimensionless)"),
    }
}

fn quantity_value(point: &AnalyticPoint, quantity: &str) -> f64 {
    match quantity {
        "delta_k" => point.delta_k,
        "f" => point.f,
        "dvar_paper" => point.dvar_paper,
        "mean_n" => point.mean_n,
        "snr" => point.snr,
        _ => f64::NAN,
    }
}

/// XML comments must not contain "--"; break any run of hyphens.
fn comment_safe(text: &str) -> String {
    text.replace("--", "- -")
}

fn escape(text: &str) -> String {
    text.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

struct Canvas {
    body: String,
}

impl Canvas {
    fn new(echo: &str) -> Self {
        let mut body = String::new();
        let _ = writeln!(
            body,
            "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{WIDTH}\" height=\"{HEIGHT}\" \
             viewBox=\"0 0 {WIDTH} {HEIGHT}\">"
        );
        let _ = writeln!(body, "<!-- resolved configuration:");
        for line in echo.lines() {
            let _ = writeln!(body, "{}", comment_safe(line));
        }
        let _ = writeln!(body, "-->");
        let _ = writeln!(
            body,
            "<rect x=\"0\" y=\"0\" width=\"{WIDTH}\" height=\"{HEIGHT}\" fill=\"#ffffff\"/>"
        );
        Canvas { body }
    }

    fn text(&mut self, x: f64, y: f64, anchor: &str, content: &str) {
        let _ = writeln!(
            self.body,
            "<text x=\"{x:.3}\" y=\"{y:.3}\" font-family=\"monospace\" font-size=\"12\" \
             text-anchor=\"{anchor}\">{}</text>",
            escape(content)
        );
    }

    fn line(&mut self, x1: f64, y1: f64, x2: f64, y2: f64) {
        let _ = writeln!(
            self.body,
            "<line x1=\"{x1:.3}\" y1=\"{y1:.3}\" x2=\"{x2:.3}\" y2=\"{y2:.3}\" \
             stroke=\"#000000\" stroke-width=\"1\"/>"
        );
    }

    fn finish(mut self) -> String {
        self.body.push_str("</svg>\n");
        self.body
    }
}

/// Frame, title, axis-name labels, and min/max tick labels shared by both
/// plot kinds.
fn draw_frame(
    canvas: &mut Canvas,
    title: &str,
    x_label: &str,
    y_label: &str,
    x_range: (f64, f64),
    y_range: (f64, f64),
) {
    let (x0, x1) = (LEFT, WIDTH - RIGHT);
    let (y0, y1) = (HEIGHT - BOTTOM, TOP);
    canvas.line(x0, y0, x1, y0);
    canvas.line(x0, y0, x0, y1);
    canvas.text(WIDTH / 2.0, TOP - 16.0, "middle", title);
    canvas.text(WIDTH / 2.0, HEIGHT - 16.0, "middle", x_label);
    let _ = writeln!(
        canvas.body,
        "<text x=\"16\" y=\"{:.3}\" font-family=\"monospace\" font-size=\"12\" \
         text-anchor=\"middle\" transform=\"rotate(-90 16 {:.3})\">{}</text>",
        HEIGHT / 2.0,
        HEIGHT / 2.0,
        escape(y_label)
    );
    canvas.text(x0, y0 + 16.0, "start", &format!("{:e}", x_range.0));
    canvas.text(x1, y0 + 16.0, "end", &format!("{:e}", x_range.1));
    canvas.text(x0 - 4.0, y0, "end", &format!("{:e}", y_range.0));
    canvas.text(x0 - 4.0, y1 + 8.0, "end", &format!("{:e}", y_range.1));
}

/// Build the SVG document for one selected output quantity over the sweep
/// grid. Rows whose evaluation failed are skipped (1D) or drawn gray (2D).
pub fn emit_svg(
    sweep: &SweepSpec,
    rows: &[SweepRow],
    quantity: &str,
    echo: &str,
) -> Result<String, String> {
    if rows.is_empty() {
        return Err("nothing to plot: the sweep produced no rows".to_string());
    }
    if quantity.is_empty() {
        return Err("nothing to plot: no output quantity selected".to_string());
    }
    match &sweep.axis2 {
        None => emit_line(sweep, rows, quantity, echo),
        Some(_) => emit_heatmap(sweep, rows, quantity, echo),
    }
}

fn emit_line(
    sweep: &SweepSpec,
    rows: &[SweepRow],
    quantity: &str,
    echo: &str,
) -> Result<String, String> {
    let points: Vec<(f64, f64)> = rows
        .iter()
        .filter_map(|row| {
            let point = row.point.as_ref().ok()?;
            let value = quantity_value(point, quantity);
            value.is_finite().then(|| (row.axis_values[0], value))
        })
        .collect();
    if points.is_empty() {
        return Err(format!("nothing to plot: no finite \"{quantity}\" values"));
    }
    let x_min = sweep.axis1.min;
    let x_max = sweep.axis1.max;
    let (mut y_min, mut y_max) = points
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &(_, y)| {
            (lo.min(y), hi.max(y))
        });
    if y_min == y_max {
        // Flat data still needs a nonzero vertical scale.
        y_min -= 0.5;
        y_max += 0.5;
    }
    let plot_w = WIDTH - LEFT - RIGHT;
    let plot_h = HEIGHT - TOP - BOTTOM;
    let map_x = |x: f64| LEFT + (x - x_min) / (x_max - x_min) * plot_w;
    let map_y = |y: f64| TOP + plot_h - (y - y_min) / (y_max - y_min) * plot_h;

    let mut canvas = Canvas::new(echo);
    draw_frame(
        &mut canvas,
        &quantity_label(quantity),
        axis_label(sweep.axis1.param),
        &quantity_label(quantity),
        (x_min, x_max),
        (y_min, y_max),
    );
    if points.len() == 1 {
        let (x, y) = points[0];
        let _ = writeln!(
            canvas.body,
            "<circle cx=\"{:.3}\" cy=\"{:.3}\" r=\"4\" fill=\"#1f4e9c\"/>",
            map_x(x),
            map_y(y)
        );
    } else {
        let coords: Vec<String> = points
            .iter()
            .map(|&(x, y)| format!("{:.3},{:.3}", map_x(x), map_y(y)))
            .collect();
        let _ = writeln!(
            canvas.body,
            "<polyline points=\"{}\" fill=\"none\" stroke=\"#1f4e9c\" stroke-width=\"1.5\"/>",
            coords.join(" ")
        );
    }
    Ok(canvas.finish())
}

fn ramp_color(t: f64) -> String {
    let mut rgb = [0u8; 3];
    for (channel, slot) in rgb.iter_mut().enumerate() {
        let value = RAMP_LO[channel] + (RAMP_HI[channel] - RAMP_LO[channel]) * t;
        *slot = value.round().clamp(0.0, 255.0) as u8;
    }
    format!("#{:02x}{:02x}{:02x}", rgb[0], rgb[1], rgb[2])
}

fn emit_heatmap(
    sweep: &SweepSpec,
    rows: &[SweepRow],
    quantity: &str,
    echo: &str,
) -> Result<String, String> {
    let axis2 = sweep.axis2.as_ref().expect("heatmap needs two axes");
    let n1 = sweep.axis1.count;
    let n2 = axis2.count;
    if rows.len() != n1 * n2 {
        return Err(format!(
            "grid shape mismatch: {} rows for a {n1}x{n2} sweep",
            rows.len()
        ));
    }
    let values: Vec<Option<f64>> = rows
        .iter()
        .map(|row| {
            let point = row.point.as_ref().ok()?;
            let value = quantity_value(point, quantity);
            value.is_finite().then_some(value)
        })
        .collect();
    let finite: Vec<f64> = values.iter().flatten().copied().collect();
    if finite.is_empty() {
        return Err(format!("nothing to plot: no finite \"{quantity}\" values"));
    }
    let v_min = finite.iter().copied().fold(f64::INFINITY, f64::min);
    let v_max = finite.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let plot_w = WIDTH - LEFT - RIGHT;
    let plot_h = HEIGHT - TOP - BOTTOM;
    let cell_w = plot_w / n1 as f64;
    let cell_h = plot_h / n2 as f64;

    let mut canvas = Canvas::new(echo);
    let title = format!(
        "{} [color: {:e} → {:e}]",
        quantity_label(quantity),
        v_min,
        v_max
    );
    draw_frame(
        &mut canvas,
        &title,
        axis_label(sweep.axis1.param),
        axis_label(axis2.param),
        (sweep.axis1.min, sweep.axis1.max),
        (axis2.min, axis2.max),
    );
    for i in 0..n1 {
        for j in 0..n2 {
            let fill = match values[i * n2 + j] {
                Some(v) => {
                    let t = if v_max > v_min { (v - v_min) / (v_max - v_min) } else { 0.5 };
                    ramp_color(t)
                }
                None => ERROR_FILL.to_string(),
            };
            let x = LEFT + i as f64 * cell_w;
            // Axis-2 values increase upward; SVG y increases downward.
            let y = TOP + (n2 - 1 - j) as f64 * cell_h;
            let _ = writeln!(
                canvas.body,
                "<rect x=\"{x:.3}\" y=\"{y:.3}\" width=\"{cell_w:.3}\" height=\"{cell_h:.3}\" \
                 fill=\"{fill}\"/>"
            );
        }
    }
    Ok(canvas.finish())
}
