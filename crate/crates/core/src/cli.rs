//! Command-line runner for the preset scenarios.
//!
//! Per-step values go to `trace.csv` and the summary to `summary.txt` (or
//! `summary.json`) in the output directory. With plotting enabled the
//! trajectory is also drawn to `trajectory.svg`.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::analysis::{estimate_displacement, normal_solution_residual, solve_shifted_fixed_point};
use crate::error::Error;
use crate::geometry::{PrimitiveSet, Vector};
use crate::scenarios::{self, ScenarioReference};
use crate::splitting::{IterationTrace, StopRule};

/// Environment variable naming the default output directory.
pub const OUT_DIR_ENV: &str = "SPLITFIX_OUT_DIR";
/// Version tag written in the CSV header comment.
pub const CSV_VERSION: &str = "splitfix-trace v1";
pub const EXIT_OK: i32 = 0;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;

const VIEW: f64 = 800.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SummaryFormat {
    /// Flat `key=value` lines.
    Csv,
    Json,
}

impl std::str::FromStr for SummaryFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "csv" => Ok(Self::Csv),
            "json" => Ok(Self::Json),
            other => Err(format!("unknown format {other:?} (expected csv or json)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub scenario: String,
    pub lambda: f64,
    /// Start point; the scenario's default when absent.
    pub x0: Option<Vector>,
    pub max_iters: usize,
    pub shadow_tol: f64,
    pub out_dir: PathBuf,
    pub format: SummaryFormat,
    pub plot: bool,
    pub thin: usize,
    pub overrides: BTreeMap<String, f64>,
}

impl RunConfig {
    pub fn new(scenario: impl Into<String>) -> Self {
        Self {
            scenario: scenario.into(),
            lambda: 0.5,
            x0: None,
            max_iters: 10_000,
            shadow_tol: 1e-10,
            out_dir: default_out_dir(),
            format: SummaryFormat::Csv,
            plot: false,
            thin: 1,
            overrides: BTreeMap::new(),
        }
    }
}

/// `$SPLITFIX_OUT_DIR` when set, otherwise `splitfix-out`.
pub fn default_out_dir() -> PathBuf {
    std::env::var_os(OUT_DIR_ENV)
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from("splitfix-out"))
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Config(_) => EXIT_CONFIG,
            Self::Numerical(_) => EXIT_NUMERICAL,
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::Diverged { .. } | Error::NoConvergence { .. } => Self::Numerical(e.to_string()),
            _ => Self::Config(e.to_string()),
        }
    }
}

fn io_error(path: &Path, e: std::io::Error) -> CliError {
    CliError::Config(format!("cannot write {}: {e}", path.display()))
}

/// Parses `"a,b,..."` into a vector.
pub fn parse_point(s: &str) -> Result<Vector, String> {
    let coords = s
        .split(',')
        .map(|t| t.trim().parse::<f64>().map_err(|e| format!("bad coordinate {t:?}: {e}")))
        .collect::<Result<Vec<_>, _>>()?;
    Vector::new(coords).map_err(|e| e.to_string())
}

/// Parses a `name=value` override.
pub fn parse_override(s: &str) -> Result<(String, f64), String> {
    let (k, v) = s.split_once('=').ok_or_else(|| format!("expected name=value, got {s:?}"))?;
    let value: f64 = v.trim().parse().map_err(|e| format!("bad value for {k}: {e}"))?;
    if !value.is_finite() {
        return Err(format!("value for {k} must be finite"));
    }
    Ok((k.trim().to_string(), value))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NormalSolutionSummary {
    /// `"found"` or `"not found (Z empty)"`.
    pub status: String,
    pub xbar: Option<Vector>,
    pub residual: Option<f64>,
    pub inclusion_residual: Option<f64>,
    pub iterations: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunSummary {
    pub scenario: String,
    pub lambda: f64,
    pub params: BTreeMap<String, f64>,
    pub x0: Vector,
    pub iterations: usize,
    pub stop_reason: String,
    pub v_est: Option<Vector>,
    pub v_est_note: Option<String>,
    pub v_tail_residual: Option<f64>,
    pub reference: ScenarioReference,
    pub shadow_final: Vector,
    pub reflected_shadow_final: Vector,
    pub shadow_dist_to_xbar: Option<f64>,
    pub normal_solution: NormalSolutionSummary,
    pub csv_path: PathBuf,
    pub svg_path: Option<PathBuf>,
}

impl RunSummary {
    /// Flat `key=value` rendering.
    pub fn to_key_value(&self) -> String {
        fn vec(v: &Option<Vector>) -> String {
            v.as_ref().map_or("none".into(), |v| join(v.as_slice()))
        }
        fn num(v: Option<f64>) -> String {
            v.map_or("none".into(), |x| format!("{x:e}"))
        }
        let mut out = String::new();
        let mut kv = |k: &str, v: String| {
            let _ = writeln!(out, "{k}={v}");
        };
        kv("scenario", self.scenario.clone());
        kv("lambda", self.lambda.to_string());
        for (k, v) in &self.params {
            kv(&format!("param.{k}"), v.to_string());
        }
        kv("x0", join(self.x0.as_slice()));
        kv("iterations", self.iterations.to_string());
        kv("stop_reason", self.stop_reason.clone());
        kv(
            "v_est",
            match (&self.v_est, &self.v_est_note) {
                (Some(v), _) => join(v.as_slice()),
                (None, Some(note)) => note.clone(),
                (None, None) => "none".into(),
            },
        );
        kv("v_tail_residual", num(self.v_tail_residual));
        kv("v_ref", vec(&self.reference.v));
        kv("consistent", self.reference.consistent.to_string());
        kv("shadow_final", join(self.shadow_final.as_slice()));
        kv("reflected_shadow_final", join(self.reflected_shadow_final.as_slice()));
        kv("xbar_ref", vec(&self.reference.xbar));
        kv("reflected_shadow_limit_ref", vec(&self.reference.reflected_shadow_limit));
        kv("shadow_dist_to_xbar", num(self.shadow_dist_to_xbar));
        kv("normal_solution", self.normal_solution.status.clone());
        kv("xbar_est", vec(&self.normal_solution.xbar));
        kv("normal_solution_residual", num(self.normal_solution.residual));
        kv("inclusion_residual", num(self.normal_solution.inclusion_residual));
        kv("csv", self.csv_path.display().to_string());
        if let Some(p) = &self.svg_path {
            kv("svg", p.display().to_string());
        }
        out
    }

    pub fn render(&self, format: SummaryFormat) -> String {
        match format {
            SummaryFormat::Csv => self.to_key_value(),
            SummaryFormat::Json => {
                let mut s = serde_json::to_string_pretty(self).expect("summary serializes");
                s.push('\n');
                s
            }
        }
    }
}

fn join(xs: &[f64]) -> String {
    xs.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")
}

/// Runs one configuration and returns the process exit code. The summary
/// goes to stdout and errors to stderr.
pub fn run(config: &RunConfig) -> i32 {
    match execute(config) {
        Ok(summary) => {
            print!("{}", summary.render(config.format));
            EXIT_OK
        }
        Err(e) => {
            eprintln!("splitfix: {e}");
            e.exit_code()
        }
    }
}

/// Does the work of [`run`] without printing.
pub fn execute(config: &RunConfig) -> Result<RunSummary, CliError> {
    if config.thin == 0 {
        return Err(CliError::Config("thin must be at least 1".into()));
    }
    let (mut spec, reference) = scenarios::build(&config.scenario, &config.overrides, config.lambda)?;
    if let Some(x0) = &config.x0 {
        x0.ensure_dim(spec.a.dim())?;
        spec.x0 = x0.clone();
    }
    let stop = StopRule::new(config.max_iters, config.shadow_tol)?;
    let trace = spec.splitting()?.iterate(&spec.x0, &stop)?;

    let (v_est, v_est_note, v_tail_residual) = if spec.lambda >= 1.0 {
        (None, Some("n/a (λ=1)".to_string()), None)
    } else {
        match estimate_displacement(&trace) {
            Ok(e) => (Some(e.v), None, Some(e.tail_residual)),
            Err(e) => (None, Some(format!("n/a ({e})")), None),
        }
    };

    let normal_solution = {
        let v = reference.v.clone().or_else(|| v_est.clone());
        let shifted_lambda = if spec.lambda < 1.0 { spec.lambda } else { 0.5 };
        let found = v.as_ref().and_then(|v| {
            solve_shifted_fixed_point(&spec.a, &spec.b, shifted_lambda, v, &spec.x0, &stop)
                .ok()
                .map(|sol| (sol, v))
        });
        match found {
            Some((sol, v)) => NormalSolutionSummary {
                status: "found".into(),
                inclusion_residual: normal_solution_residual(&spec.a, &spec.b, &sol.xbar, v),
                xbar: Some(sol.xbar),
                residual: Some(sol.residual),
                iterations: Some(sol.iterations),
            },
            None => NormalSolutionSummary {
                status: "not found (Z empty)".into(),
                xbar: None,
                residual: None,
                inclusion_residual: None,
                iterations: None,
            },
        }
    };

    fs::create_dir_all(&config.out_dir).map_err(|e| io_error(&config.out_dir, e))?;
    let csv_path = config.out_dir.join("trace.csv");
    let csv = trace_csv(&trace, reference.xbar.as_ref(), config.thin);
    fs::write(&csv_path, csv).map_err(|e| io_error(&csv_path, e))?;

    let svg_path = if config.plot {
        let path = config.out_dir.join("trajectory.svg");
        let svg = plot_svg(&trace, reference.xbar.as_ref(), &spec.constraint_sets(), config.thin)?;
        fs::write(&path, svg).map_err(|e| io_error(&path, e))?;
        Some(path)
    } else {
        None
    };

    let last = trace.last_row().expect("a trace has at least one row");
    let summary = RunSummary {
        scenario: spec.name.clone(),
        lambda: spec.lambda,
        params: spec.params.clone(),
        x0: spec.x0.clone(),
        iterations: trace.len(),
        stop_reason: trace.stop_reason().to_string(),
        v_est,
        v_est_note,
        v_tail_residual,
        shadow_dist_to_xbar: reference.xbar.as_ref().map(|x| last.shadow.distance(x)),
        shadow_final: last.shadow.clone(),
        reflected_shadow_final: last.reflected_shadow.clone(),
        reference,
        normal_solution,
        csv_path,
        svg_path,
    };
    let name = match config.format {
        SummaryFormat::Csv => "summary.txt",
        SummaryFormat::Json => "summary.json",
    };
    let path = config.out_dir.join(name);
    fs::write(&path, summary.render(config.format)).map_err(|e| io_error(&path, e))?;
    Ok(summary)
}

/// Column names of the trace CSV for a given dimension.
pub fn csv_columns(dim: usize, with_xbar: bool) -> Vec<String> {
    let mut cols = vec!["n".to_string()];
    for prefix in ["x", "shadow", "reflected_shadow"] {
        cols.extend((1..=dim).map(|i| format!("{prefix}{i}")));
    }
    cols.push("step_norm".into());
    if with_xbar {
        cols.push("dist_to_xbar".into());
    }
    cols
}

/// Renders every `thin`-th row, plus the last one, with 17 significant
/// digits so values parse back bit-identically.
pub fn trace_csv(trace: &IterationTrace, xbar: Option<&Vector>, thin: usize) -> String {
    let thin = thin.max(1);
    let cols = csv_columns(trace.dim(), xbar.is_some());
    let mut out = format!("# {CSV_VERSION}: {}\n{}\n", cols.join(","), cols.join(","));
    let last = trace.len() - 1;
    for (n, row) in trace.rows().iter().enumerate() {
        if n % thin != 0 && n != last {
            continue;
        }
        let _ = write!(out, "{n}");
        for x in row.x.iter().chain(row.shadow.iter()).chain(row.reflected_shadow.iter()) {
            let _ = write!(out, ",{x:.16e}");
        }
        let _ = write!(out, ",{:.16e}", row.step_diff.norm());
        if let Some(xbar) = xbar {
            let _ = write!(out, ",{:.16e}", row.shadow.distance(xbar));
        }
        out.push('\n');
    }
    out
}

/// Parsed trace CSV: column names and numeric rows.
#[derive(Debug, Clone, PartialEq)]
pub struct CsvTable {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

pub fn parse_trace_csv(text: &str) -> Result<CsvTable, String> {
    let mut lines = text.lines().filter(|l| !l.starts_with('#') && !l.is_empty());
    let columns: Vec<String> = lines
        .next()
        .ok_or("missing header row")?
        .split(',')
        .map(str::to_string)
        .collect();
    let rows = lines
        .map(|l| {
            let row = l
                .split(',')
                .map(|t| t.parse::<f64>().map_err(|e| format!("bad number {t:?}: {e}")))
                .collect::<Result<Vec<_>, _>>()?;
            if row.len() == columns.len() {
                Ok(row)
            } else {
                Err(format!("expected {} fields, got {}", columns.len(), row.len()))
            }
        })
        .collect::<Result<_, String>>()?;
    Ok(CsvTable { columns, rows })
}

struct Frame {
    cx: f64,
    cy: f64,
    scale: f64,
    half_extent: f64,
}

impl Frame {
    fn fit(points: &[(f64, f64)]) -> Self {
        let (mut x0, mut x1, mut y0, mut y1) = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
        for &(x, y) in points {
            x0 = x0.min(x);
            x1 = x1.max(x);
            y0 = y0.min(y);
            y1 = y1.max(y);
        }
        let span = (x1 - x0).max(y1 - y0);
        let span = if span > 0.0 { span * 1.2 } else { 1.0 };
        Self {
            cx: 0.5 * (x0 + x1),
            cy: 0.5 * (y0 + y1),
            scale: VIEW / span,
            half_extent: 0.5 * span,
        }
    }

    fn px(&self, x: f64, y: f64) -> (f64, f64) {
        (
            0.5 * VIEW + (x - self.cx) * self.scale,
            0.5 * VIEW - (y - self.cy) * self.scale,
        )
    }
}

/// Static SVG of the governing and shadow iterates, the reference point,
/// and the constraint sets. Only planar traces are supported.
pub fn plot_svg(
    trace: &IterationTrace,
    xbar: Option<&Vector>,
    sets: &[&PrimitiveSet],
    thin: usize,
) -> Result<String, CliError> {
    if trace.dim() != 2 {
        return Err(CliError::Config(format!("plots are 2-D only, trace has dimension {}", trace.dim())));
    }
    let thin = thin.max(1);
    let last = trace.len() - 1;
    let rows: Vec<_> = trace
        .rows()
        .iter()
        .enumerate()
        .filter(|(n, _)| n % thin == 0 || *n == last)
        .map(|(_, r)| r)
        .collect();
    let governing: Vec<(f64, f64)> = rows.iter().map(|r| (r.x[0], r.x[1])).collect();
    let shadows: Vec<(f64, f64)> = rows.iter().map(|r| (r.shadow[0], r.shadow[1])).collect();
    let mut all = governing.clone();
    all.extend(&shadows);
    if let Some(x) = xbar {
        all.push((x[0], x[1]));
    }
    let frame = Frame::fit(&all);

    let mut svg = format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{VIEW}\" height=\"{VIEW}\" viewBox=\"0 0 {VIEW} {VIEW}\">\n\
         <rect class=\"background\" x=\"0\" y=\"0\" width=\"{VIEW}\" height=\"{VIEW}\" fill=\"white\"/>\n"
    );
    for set in sets {
        svg.push_str(&set_outline(set, &frame));
    }
    for (class, colour, points) in [("governing", "#1f77b4", &governing), ("shadow", "#d62728", &shadows)] {
        let _ = writeln!(svg, "<g class=\"{class}\" fill=\"{colour}\">");
        for &(x, y) in points.iter() {
            let (px, py) = frame.px(x, y);
            let _ = writeln!(svg, "<circle cx=\"{px:.3}\" cy=\"{py:.3}\" r=\"3\"/>");
        }
        svg.push_str("</g>\n");
    }
    if let Some(x) = xbar {
        let (px, py) = frame.px(x[0], x[1]);
        let _ = writeln!(
            svg,
            "<g class=\"xbar\" data-x=\"{}\" data-y=\"{}\" stroke=\"black\" stroke-width=\"2\">\
             <line x1=\"{:.3}\" y1=\"{py:.3}\" x2=\"{:.3}\" y2=\"{py:.3}\"/>\
             <line x1=\"{px:.3}\" y1=\"{:.3}\" x2=\"{px:.3}\" y2=\"{:.3}\"/></g>",
            x[0],
            x[1],
            px - 8.0,
            px + 8.0,
            py - 8.0,
            py + 8.0
        );
    }
    svg.push_str("</svg>\n");
    Ok(svg)
}

fn set_outline(set: &PrimitiveSet, frame: &Frame) -> String {
    const STYLE: &str = "class=\"set\" fill=\"none\" stroke=\"#555\" stroke-width=\"1.5\"";
    // Long enough to cross the whole view from any point on a line through the origin.
    let reach = frame.cx.hypot(frame.cy) + 2.0 * frame.half_extent;
    let segment = |p: (f64, f64), d: (f64, f64)| {
        let (x1, y1) = frame.px(p.0 - reach * d.0, p.1 - reach * d.1);
        let (x2, y2) = frame.px(p.0 + reach * d.0, p.1 + reach * d.1);
        format!("<line {STYLE} x1=\"{x1:.3}\" y1=\"{y1:.3}\" x2=\"{x2:.3}\" y2=\"{y2:.3}\"/>\n")
    };
    match set {
        PrimitiveSet::Ball { center, radius } => {
            let (cx, cy) = frame.px(center[0], center[1]);
            format!("<circle {STYLE} cx=\"{cx:.3}\" cy=\"{cy:.3}\" r=\"{:.3}\"/>\n", radius * frame.scale)
        }
        PrimitiveSet::Box { lo, hi } => {
            let (x, y) = frame.px(lo[0], hi[1]);
            format!(
                "<rect {STYLE} x=\"{x:.3}\" y=\"{y:.3}\" width=\"{:.3}\" height=\"{:.3}\"/>\n",
                (hi[0] - lo[0]) * frame.scale,
                (hi[1] - lo[1]) * frame.scale
            )
        }
        PrimitiveSet::LineThroughOrigin { direction } => segment((0.0, 0.0), (direction[0], direction[1])),
        PrimitiveSet::Halfspace { normal } => segment((0.0, 0.0), (-normal[1], normal[0])),
    }
}
