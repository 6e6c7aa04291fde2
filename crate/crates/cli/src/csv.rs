//! CSV emission: '#'-prefixed resolved-config lines, one header row, '.'
//! decimal, scientific-notation cells. Output bytes are a pure function of
//! the evaluated rows, never of execution order.

use crate::commands::{AnalyticPoint, CliError, SweepRow};
use crate::config::SweepSpec;

/// Fixed output columns shared by the single-point and sweep tables.
const OUTPUT_COLUMNS: [&str; 10] = [
    "r",
    "theta",
    "n_th",
    "eps_kick [J]",
    "delta_k [J]",
    "f",
    "dvar_paper [J²]",
    "mean_n",
    "snr",
    "error",
];

/// An in-memory CSV document: config echo, header, data rows.
#[derive(Debug, Clone)]
pub struct Table {
    echo: String,
    header: String,
    rows: Vec<String>,
}

fn point_cells(point: &AnalyticPoint) -> Vec<String> {
    vec![
        format!("{:e}", point.r),
        format!("{:e}", point.theta),
        format!("{:e}", point.n_th),
        format!("{:e}", point.eps_kick),
        format!("{:e}", point.delta_k),
        format!("{:e}", point.f),
        format!("{:e}", point.dvar_paper),
        format!("{:e}", point.mean_n),
        format!("{:e}", point.snr),
        String::new(),
    ]
}

/// Error messages go in the last cell; strip the CSV delimiters from them.
fn error_cells(message: &str) -> Vec<String> {
    let mut cells = vec![String::new(); OUTPUT_COLUMNS.len() - 1];
    cells.push(message.replace(',', ";").replace('\n', " "));
    cells
}

impl Table {
    /// One-row table for a single-point evaluation.
    pub fn single(echo: &str, point: AnalyticPoint) -> Self {
        Table {
            echo: echo.to_string(),
            header: OUTPUT_COLUMNS.join(","),
            rows: vec![point_cells(&point).join(",")],
        }
    }

    /// Sweep table: axis-value columns (named after the swept parameters)
    /// followed by the fixed output columns. Rows arrive already in
    /// lexicographic (axis1 index, axis2 index) order.
    pub fn from_rows(echo: &str, sweep: &SweepSpec, rows: &[SweepRow]) -> Self {
        let mut columns = vec![format!("axis1_{}", sweep.axis1.param.name())];
        if let Some(axis2) = &sweep.axis2 {
            columns.push(format!("axis2_{}", axis2.param.name()));
        }
        columns.extend(OUTPUT_COLUMNS.iter().map(|c| c.to_string()));
        let body = rows
            .iter()
            .map(|row| {
                let mut cells: Vec<String> =
                    row.axis_values.iter().map(|v| format!("{v:e}")).collect();
                match &row.point {
                    Ok(point) => cells.extend(point_cells(point)),
                    Err(message) => cells.extend(error_cells(message)),
                }
                cells.join(",")
            })
            .collect();
        Table {
            echo: echo.to_string(),
            header: columns.join(","),
            rows: body,
        }
    }

    /// Full document: metadata lines, header, rows, trailing newline.
    pub fn render(&self) -> String {
        let mut out = String::new();
        out.push_str("# resolved configuration:\n");
        for line in self.echo.lines() {
            out.push_str("# ");
            out.push_str(line);
            out.push('\n');
        }
        out.push_str(&self.header);
        out.push('\n');
        for row in &self.rows {
            out.push_str(row);
            out.push('\n');
        }
        out
    }
}

pub fn write_file(path: &str, table: &Table) -> Result<(), CliError> {
    std::fs::write(path, table.render())
        .map_err(|e| CliError::Io(format!("cannot write {path}: {e}")))
}
