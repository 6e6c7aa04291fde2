//! Config-file ingestion: strict TOML schema with nearest-key suggestions,
//! physics validation at load time, and a deterministic resolved-config echo
//! for embedding into every output artifact.

use serde::Deserialize;

use dce_core::fock::{MAX_DIM, MIN_DIM};
use dce_core::params::{reduce_with_occupancy, CavityConfig, ElectronConfig, PhysicalConstants};
use dce_core::propagator::{Frame, ModelFlags, TOL_MAX, TOL_MIN};

use crate::commands::CliError;

/// Default integration tolerance when the config and CLI leave it unset.
pub const DEFAULT_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileConfig {
    cavity: FileCavity,
    electron: FileElectron,
    #[serde(default)]
    flags: FileFlags,
    #[serde(default)]
    run: FileRun,
    sweep: Option<FileSweep>,
    #[serde(default)]
    output: FileOutput,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileCavity {
    omega: f64,
    volume: f64,
    lambda_sq: f64,
    #[serde(default)]
    temperature: f64,
    n_th: Option<f64>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileElectron {
    v0: f64,
    sigma_x: f64,
    flight_length: f64,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileFlags {
    rwa: Option<bool>,
    backaction: Option<bool>,
    frame: Option<String>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileRun {
    tol: Option<f64>,
    workers: Option<usize>,
    fock_dim: Option<usize>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileSweep {
    axis1: FileAxis,
    axis2: Option<FileAxis>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileAxis {
    param: String,
    min: f64,
    max: f64,
    count: usize,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileOutput {
    csv: Option<String>,
    svg: Option<String>,
    quantity: Option<String>,
}

/// Parameter a sweep axis can scan.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepParam {
    R,
    Theta,
    NTh,
    Temperature,
    V0,
    L,
}

impl SweepParam {
    pub const ALL: [(&'static str, SweepParam); 6] = [
        ("r", SweepParam::R),
        ("theta", SweepParam::Theta),
        ("n_th", SweepParam::NTh),
        ("temperature", SweepParam::Temperature),
        ("v0", SweepParam::V0),
        ("L", SweepParam::L),
    ];

    pub fn name(self) -> &'static str {
        Self::ALL
            .iter()
            .find(|(_, p)| *p == self)
            .map(|(n, _)| *n)
            .expect("every variant is named")
    }

    fn parse(s: &str) -> Result<Self, CliError> {
        Self::ALL
            .iter()
            .find(|(n, _)| *n == s)
            .map(|(_, p)| *p)
            .ok_or_else(|| {
                let known: Vec<&str> = Self::ALL.iter().map(|(n, _)| *n).collect();
                CliError::Config(format!(
                    "unknown sweep parameter {s:?}; expected one of {known:?}{}",
                    suggestion(s, &known)
                ))
            })
    }
}

/// One sweep axis: parameter, inclusive range, point count.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepAxis {
    pub param: SweepParam,
    pub min: f64,
    pub max: f64,
    pub count: usize,
}

impl SweepAxis {
    /// Grid value at index k (endpoints inclusive).
    pub fn value(&self, k: usize) -> f64 {
        self.min + (self.max - self.min) * k as f64 / (self.count - 1) as f64
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepSpec {
    pub axis1: SweepAxis,
    pub axis2: Option<SweepAxis>,
}

/// Output-quantity column an SVG plot can select.
pub const QUANTITIES: [&str; 5] = ["delta_k", "f", "dvar_paper", "mean_n", "snr"];

/// Fully validated run configuration; every physics precondition is checked
/// by [`load_config`], commands can consume it without re-validating.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub cavity: CavityConfig,
    pub electron: ElectronConfig,
    pub n_th_override: Option<f64>,
    pub flags: ModelFlags,
    pub tol: f64,
    pub workers: usize,
    pub fock_dim: Option<usize>,
    pub sweep: Option<SweepSpec>,
    pub csv_out: Option<String>,
    pub svg_out: Option<String>,
    pub quantity: String,
}

impl RunConfig {
    /// Deterministic TOML-shaped echo of the fully resolved configuration
    /// (defaults and command-line overrides applied).
    pub fn echo(&self) -> String {
        let mut s = String::new();
        s.push_str("[cavity]\n");
        s.push_str(&format!("omega = {:e}\n", self.cavity.omega));
        s.push_str(&format!("volume = {:e}\n", self.cavity.volume));
        s.push_str(&format!("lambda_sq = {:e}\n", self.cavity.lambda_sq));
        s.push_str(&format!("temperature = {:e}\n", self.cavity.temperature));
        if let Some(n) = self.n_th_override {
            s.push_str(&format!("n_th = {n:e}\n"));
        }
        s.push_str("[electron]\n");
        s.push_str(&format!("v0 = {:e}\n", self.electron.v0));
        s.push_str(&format!("sigma_x = {:e}\n", self.electron.sigma_x));
        s.push_str(&format!("flight_length = {:e}\n", self.electron.flight_length));
        s.push_str("[flags]\n");
        s.push_str(&format!("rwa = {}\n", self.flags.rwa));
        s.push_str(&format!("backaction = {}\n", self.flags.backaction));
        let frame = match self.flags.frame {
            Frame::Rotating => "rotating",
            Frame::Lab => "lab",
        };
        s.push_str(&format!("frame = \"{frame}\"\n"));
        s.push_str("[run]\n");
        s.push_str(&format!("tol = {:e}\n", self.tol));
        // The worker count is deliberately not echoed: results are
        // schedule-independent, so it is not part of the resolved physics.
        if let Some(d) = self.fock_dim {
            s.push_str(&format!("fock_dim = {d}\n"));
        }
        if let Some(sweep) = &self.sweep {
            let mut axis = |label: &str, a: &SweepAxis| {
                s.push_str(&format!("[sweep.{label}]\n"));
                s.push_str(&format!("param = \"{}\"\n", a.param.name()));
                s.push_str(&format!("min = {:e}\n", a.min));
                s.push_str(&format!("max = {:e}\n", a.max));
                s.push_str(&format!("count = {}\n", a.count));
            };
            axis("axis1", &sweep.axis1);
            if let Some(a2) = &sweep.axis2 {
                axis("axis2", a2);
            }
        }
        s.push_str("[output]\n");
        if let Some(p) = &self.csv_out {
            s.push_str(&format!("csv = {p:?}\n"));
        }
        if let Some(p) = &self.svg_out {
            s.push_str(&format!("svg = {p:?}\n"));
        }
        s.push_str(&format!("quantity = \"{}\"\n", self.quantity));
        s
    }
}

/// Levenshtein edit distance; small inputs only (schema keys).
fn edit_distance(a: &str, b: &str) -> usize {
    let a: Vec<char> = a.chars().collect();
    let b: Vec<char> = b.chars().collect();
    let mut prev: Vec<usize> = (0..=b.len()).collect();
    let mut curr = vec![0usize; b.len() + 1];
    for (i, ca) in a.iter().enumerate() {
        curr[0] = i + 1;
        for (j, cb) in b.iter().enumerate() {
            let sub = prev[j] + usize::from(ca != cb);
            curr[j + 1] = sub.min(prev[j + 1] + 1).min(curr[j] + 1);
        }
        std::mem::swap(&mut prev, &mut curr);
    }
    prev[b.len()]
}

/// "; did you mean \"<key>\"?" for the known key nearest in edit distance.
fn suggestion(got: &str, known: &[&str]) -> String {
    known
        .iter()
        .map(|k| (edit_distance(got, k), *k))
        .min()
        .map(|(_, k)| format!("; did you mean \"{k}\"?"))
        .unwrap_or_default()
}

/// Reject unknown sections/keys before typed deserialization so the error can
/// carry a nearest-key suggestion.
fn check_keys(value: &toml::Value) -> Result<(), CliError> {
    const SCHEMA: [(&str, &[&str]); 6] = [
        ("cavity", &["omega", "volume", "lambda_sq", "temperature", "n_th"]),
        ("electron", &["v0", "sigma_x", "flight_length"]),
        ("flags", &["rwa", "backaction", "frame"]),
        ("run", &["tol", "workers", "fock_dim"]),
        ("sweep", &["axis1", "axis2"]),
        ("output", &["csv", "svg", "quantity"]),
    ];
    const AXIS_KEYS: [&str; 4] = ["param", "min", "max", "count"];
    let table = value
        .as_table()
        .ok_or_else(|| CliError::Config("config root must be a table".into()))?;
    let sections: Vec<&str> = SCHEMA.iter().map(|(s, _)| *s).collect();
    for (section, sub) in table {
        let Some((_, keys)) = SCHEMA.iter().find(|(s, _)| s == section) else {
            return Err(CliError::Config(format!(
                "unknown section [{section}]{}",
                suggestion(section, &sections)
            )));
        };
        let Some(sub_table) = sub.as_table() else {
            return Err(CliError::Config(format!("[{section}] must be a table")));
        };
        for (key, val) in sub_table {
            if !keys.contains(&key.as_str()) {
                return Err(CliError::Config(format!(
                    "unknown key \"{key}\" in [{section}]{}",
                    suggestion(key, keys)
                )));
            }
            if section == "sweep" {
                let Some(axis_table) = val.as_table() else {
                    return Err(CliError::Config(format!("[sweep.{key}] must be a table")));
                };
                for axis_key in axis_table.keys() {
                    if !AXIS_KEYS.contains(&axis_key.as_str()) {
                        return Err(CliError::Config(format!(
                            "unknown key \"{axis_key}\" in [sweep.{key}]{}",
                            suggestion(axis_key, &AXIS_KEYS)
                        )));
                    }
                }
            }
        }
    }
    Ok(())
}

fn resolve_axis(axis: &FileAxis, label: &str) -> Result<SweepAxis, CliError> {
    let param = SweepParam::parse(&axis.param)?;
    if !(axis.min.is_finite() && axis.max.is_finite()) {
        return Err(CliError::Config(format!("[sweep.{label}] range must be finite")));
    }
    if axis.min >= axis.max {
        return Err(CliError::Config(format!(
            "[sweep.{label}] needs min < max, got {:e} >= {:e}",
            axis.min, axis.max
        )));
    }
    if axis.count < 2 {
        return Err(CliError::Config(format!(
            "[sweep.{label}] needs count >= 2, got {}",
            axis.count
        )));
    }
    Ok(SweepAxis { param, min: axis.min, max: axis.max, count: axis.count })
}

/// Parse, schema-check, default-fill, and physics-validate a config file.
pub fn load_config(path: &str) -> Result<RunConfig, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Config(format!("cannot read config {path}: {e}")))?;
    let value: toml::Value = text
        .parse()
        .map_err(|e| CliError::Config(format!("config parse error in {path}: {e}")))?;
    check_keys(&value)?;
    let file: FileConfig = value
        .try_into()
        .map_err(|e| CliError::Config(format!("config error in {path}: {e}")))?;

    let cavity = CavityConfig {
        omega: file.cavity.omega,
        volume: file.cavity.volume,
        lambda_sq: file.cavity.lambda_sq,
        temperature: file.cavity.temperature,
    };
    let electron = ElectronConfig {
        v0: file.electron.v0,
        sigma_x: file.electron.sigma_x,
        flight_length: file.electron.flight_length,
    };
    let frame = match file.flags.frame.as_deref() {
        None | Some("rotating") => Frame::Rotating,
        Some("lab") => Frame::Lab,
        Some(other) => {
            return Err(CliError::Config(format!(
                "unknown frame {other:?}; expected \"rotating\" or \"lab\"{}",
                suggestion(other, &["rotating", "lab"])
            )));
        }
    };
    let canonical = ModelFlags::canonical();
    let flags = ModelFlags {
        rwa: file.flags.rwa.unwrap_or(canonical.rwa),
        backaction: file.flags.backaction.unwrap_or(canonical.backaction),
        frame,
    };
    let tol = file.run.tol.unwrap_or(DEFAULT_TOL);
    if !(TOL_MIN..=TOL_MAX).contains(&tol) {
        return Err(CliError::Config(format!(
            "tol {tol:e} outside [{TOL_MIN:e}, {TOL_MAX:e}]"
        )));
    }
    if let Some(d) = file.run.fock_dim {
        if !(MIN_DIM..=MAX_DIM).contains(&d) {
            return Err(CliError::Config(format!(
                "fock_dim {d} outside [{MIN_DIM}, {MAX_DIM}]"
            )));
        }
    }
    if file.cavity.n_th.is_some() && file.cavity.temperature > 0.0 {
        eprintln!(
            "warning: both temperature and n_th set in [cavity]; the explicit n_th wins"
        );
    }
    let sweep = match &file.sweep {
        None => None,
        Some(s) => {
            let axis1 = resolve_axis(&s.axis1, "axis1")?;
            let axis2 = s.axis2.as_ref().map(|a| resolve_axis(a, "axis2")).transpose()?;
            if let Some(a2) = &axis2 {
                if a2.param == axis1.param {
                    return Err(CliError::Config(format!(
                        "sweep axes must name distinct parameters, both are \"{}\"",
                        axis1.param.name()
                    )));
                }
            }
            Some(SweepSpec { axis1, axis2 })
        }
    };
    let quantity = file.output.quantity.unwrap_or_else(|| "delta_k".to_string());
    if !QUANTITIES.contains(&quantity.as_str()) {
        return Err(CliError::Config(format!(
            "unknown output quantity {quantity:?}; expected one of {QUANTITIES:?}{}",
            suggestion(&quantity, &QUANTITIES)
        )));
    }

    // Run the full reduction once so every physics bound is enforced here;
    // bad numbers in the file are a config problem, not a runtime failure.
    reduce_with_occupancy(&cavity, &electron, &PhysicalConstants::codata(), file.cavity.n_th)
        .map_err(|e| CliError::Config(format!("invalid config: {e}")))?;

    Ok(RunConfig {
        cavity,
        electron,
        n_th_override: file.cavity.n_th,
        flags,
        tol,
        workers: file.run.workers.unwrap_or(0),
        fock_dim: file.run.fock_dim,
        sweep,
        csv_out: file.output.csv,
        svg_out: file.output.svg,
        quantity,
    })
}
