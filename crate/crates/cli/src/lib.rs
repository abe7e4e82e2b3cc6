//! Batch runner: classify `.poly` models and emit one result row per model.

use std::fmt::Write as _;
use std::fs;
use std::io;
use std::path::{Path, PathBuf};
use std::time::Duration;

use clap::{ArgGroup, Parser, ValueEnum};
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;
use toricity_core::{
    classify, ClassifyConfig, FieldSpec, OrderKind, SystemFile, SystemFileError, TestOutcome,
    TestStatus, ToricityReport,
};

/// Column names, in output order.
pub const CSV_HEADER: [&str; 14] = [
    "model", "m", "n", "iota", "t_iota", "mu", "t_mu", "eta", "t_eta", "gamma", "t_gamma", "coset",
    "group", "t_total",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Table,
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OrderArg {
    Lex,
    Grevlex,
}

impl From<OrderArg> for OrderKind {
    fn from(o: OrderArg) -> Self {
        match o {
            OrderArg::Lex => OrderKind::Lex,
            OrderArg::Grevlex => OrderKind::Grevlex,
        }
    }
}

fn parse_char(s: &str) -> Result<FieldSpec, String> {
    let p: u64 = s.parse().map_err(|e| format!("{e}"))?;
    FieldSpec::new(p).map_err(|e| e.to_string())
}

fn parse_seconds(s: &str) -> Result<f64, String> {
    let v: f64 = s.parse().map_err(|e| format!("{e}"))?;
    if v.is_finite() && v >= 0.0 {
        Ok(v)
    } else {
        Err("expected a non-negative number of seconds".into())
    }
}

/// Decide group and coset structure of the torus part of polynomial systems.
#[derive(Debug, Parser)]
#[command(name = "toricity", version, about)]
#[command(group(ArgGroup::new("input").required(true).multiple(true).args(["paths", "manifest"])))]
pub struct Args {
    /// Field characteristic: 0 or a prime.
    #[arg(long = "char", value_name = "N", default_value = "0", value_parser = parse_char)]
    pub field: FieldSpec,

    #[arg(long, value_enum, default_value = "grevlex")]
    pub order: OrderArg,

    /// Seconds per test; 0 means unlimited.
    #[arg(long, value_name = "SEC", default_value = "0", value_parser = parse_seconds)]
    pub test_timeout: f64,

    /// Seconds per model, all tests together; 0 means unlimited.
    #[arg(long, value_name = "SEC", default_value = "0", value_parser = parse_seconds)]
    pub model_timeout: f64,

    /// Skip remaining tests once iota or mu fails.
    #[arg(long)]
    pub fail_fast: bool,

    #[arg(long, value_enum, default_value = "table")]
    pub format: Format,

    /// Models classified in parallel.
    #[arg(long, value_name = "N", default_value = "1", value_parser = clap::value_parser!(u16).range(1..))]
    pub jobs: u16,

    /// Write the report here instead of stdout.
    #[arg(long, value_name = "PATH")]
    pub output: Option<PathBuf>,

    /// File listing one .poly path per line.
    #[arg(long, value_name = "PATH")]
    pub manifest: Option<PathBuf>,

    /// Input .poly files.
    #[arg(value_name = "FILE")]
    pub paths: Vec<PathBuf>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub field: FieldSpec,
    pub order: OrderKind,
    pub test_timeout: Option<Duration>,
    pub model_timeout: Option<Duration>,
    pub fail_fast: bool,
    pub format: Format,
    pub jobs: usize,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            field: FieldSpec::RATIONALS,
            order: OrderKind::Grevlex,
            test_timeout: None,
            model_timeout: None,
            fail_fast: false,
            format: Format::Table,
            jobs: 1,
        }
    }
}

fn budget_secs(s: f64) -> Option<Duration> {
    (s > 0.0).then(|| Duration::from_secs_f64(s))
}

impl Args {
    pub fn config(&self) -> RunConfig {
        RunConfig {
            field: self.field,
            order: self.order.into(),
            test_timeout: budget_secs(self.test_timeout),
            model_timeout: budget_secs(self.model_timeout),
            fail_fast: self.fail_fast,
            format: self.format,
            jobs: self.jobs as usize,
        }
    }

    /// Positional paths followed by manifest entries.
    pub fn inputs(&self) -> Result<Vec<PathBuf>, ManifestError> {
        let mut out = self.paths.clone();
        if let Some(m) = &self.manifest {
            out.extend(read_manifest(m)?);
        }
        Ok(out)
    }
}

#[derive(Debug, Error)]
#[error("cannot read manifest {path}: {source}")]
pub struct ManifestError {
    pub path: PathBuf,
    pub source: io::Error,
}

/// One path per line, relative paths resolved against the manifest's
/// directory. `#` starts a comment.
pub fn read_manifest(path: &Path) -> Result<Vec<PathBuf>, ManifestError> {
    let text = fs::read_to_string(path).map_err(|source| ManifestError {
        path: path.to_path_buf(),
        source,
    })?;
    let dir = path.parent().unwrap_or(Path::new(""));
    Ok(text
        .lines()
        .map(|l| l.split('#').next().unwrap_or("").trim())
        .filter(|l| !l.is_empty())
        .map(|l| dir.join(l))
        .collect())
}

/// Status cell with its time in seconds.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Cell {
    pub status: String,
    pub seconds: f64,
}

impl Cell {
    fn from_outcome(o: &TestOutcome) -> Self {
        Cell {
            status: o.status.as_str().to_string(),
            seconds: o.elapsed.as_secs_f64(),
        }
    }

    fn error() -> Self {
        Cell {
            status: "error".into(),
            seconds: 0.0,
        }
    }
}

/// One model's line in the report. Error rows carry `error` markers and
/// zero sizes.
#[derive(Debug, Clone, PartialEq)]
pub struct ReportRow {
    pub model: String,
    pub m: usize,
    pub n: usize,
    pub iota: Cell,
    pub mu: Cell,
    pub eta: Cell,
    pub gamma: Cell,
    pub coset: String,
    pub group: String,
    pub total: f64,
    pub valid_over: String,
    pub error: Option<String>,
}

impl ReportRow {
    pub fn from_report(model: impl Into<String>, r: &ToricityReport) -> Self {
        ReportRow {
            model: model.into(),
            m: r.m,
            n: r.n,
            iota: Cell::from_outcome(&r.iota),
            mu: Cell::from_outcome(&r.mu),
            eta: Cell::from_outcome(&r.eta),
            gamma: Cell::from_outcome(&r.gamma),
            coset: r.coset.as_str().into(),
            group: r.group.as_str().into(),
            total: r.elapsed.as_secs_f64(),
            valid_over: r.valid_over(),
            error: None,
        }
    }

    pub fn from_error(model: impl Into<String>, message: impl Into<String>) -> Self {
        ReportRow {
            model: model.into(),
            m: 0,
            n: 0,
            iota: Cell::error(),
            mu: Cell::error(),
            eta: Cell::error(),
            gamma: Cell::error(),
            coset: "error".into(),
            group: "error".into(),
            total: 0.0,
            valid_over: String::new(),
            error: Some(message.into()),
        }
    }

    pub fn is_error(&self) -> bool {
        self.error.is_some()
    }

    pub fn has_timeout(&self) -> bool {
        let t = TestStatus::Timeout.as_str();
        [&self.iota, &self.mu, &self.eta, &self.gamma]
            .iter()
            .any(|c| c.status == t)
    }

    /// Cells in `CSV_HEADER` order.
    pub fn cells(&self) -> [String; 14] {
        let t = |s: f64| format!("{s:.3}");
        [
            self.model.clone(),
            self.m.to_string(),
            self.n.to_string(),
            self.iota.status.clone(),
            t(self.iota.seconds),
            self.mu.status.clone(),
            t(self.mu.seconds),
            self.eta.status.clone(),
            t(self.eta.seconds),
            self.gamma.status.clone(),
            t(self.gamma.seconds),
            self.coset.clone(),
            self.group.clone(),
            t(self.total),
        ]
    }
}

#[derive(Serialize)]
struct JsonRow<'a> {
    model: &'a str,
    m: usize,
    n: usize,
    iota: &'a str,
    t_iota: f64,
    mu: &'a str,
    t_mu: f64,
    eta: &'a str,
    t_eta: f64,
    gamma: &'a str,
    t_gamma: f64,
    coset: &'a str,
    group: &'a str,
    t_total: f64,
    #[serde(skip_serializing_if = "str::is_empty")]
    valid_over: &'a str,
    #[serde(skip_serializing_if = "Option::is_none")]
    error: Option<&'a str>,
}

fn millis(s: f64) -> f64 {
    (s * 1000.0).round() / 1000.0
}

impl<'a> From<&'a ReportRow> for JsonRow<'a> {
    fn from(r: &'a ReportRow) -> Self {
        JsonRow {
            model: &r.model,
            m: r.m,
            n: r.n,
            iota: &r.iota.status,
            t_iota: millis(r.iota.seconds),
            mu: &r.mu.status,
            t_mu: millis(r.mu.seconds),
            eta: &r.eta.status,
            t_eta: millis(r.eta.seconds),
            gamma: &r.gamma.status,
            t_gamma: millis(r.gamma.seconds),
            coset: &r.coset,
            group: &r.group,
            t_total: millis(r.total),
            valid_over: &r.valid_over,
            error: r.error.as_deref(),
        }
    }
}

/// Model id: the file name without its extension.
pub fn model_id(path: &Path) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| path.display().to_string())
}

pub fn run_model(path: &Path, config: &RunConfig) -> ReportRow {
    let id = model_id(path);
    let parsed = SystemFile::read(path, config.field).and_then(|f| {
        f.to_system().map_err(|source| SystemFileError::Parse {
            path: path.to_path_buf(),
            source,
        })
    });
    let system = match parsed {
        Ok(s) => s,
        Err(e) => return ReportRow::from_error(id, e.to_string()),
    };
    let cc = ClassifyConfig {
        order: config.order,
        test_timeout: config.test_timeout,
        model_timeout: config.model_timeout,
        fail_fast: config.fail_fast,
        concurrent: false,
    };
    ReportRow::from_report(id, &classify(&system, &cc))
}

/// Rows come back in input order whatever the worker count.
pub fn run_batch(paths: &[PathBuf], config: &RunConfig) -> Vec<ReportRow> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.jobs.max(1))
        .build()
        .expect("thread pool");
    pool.install(|| paths.par_iter().map(|p| run_model(p, config)).collect())
}

pub fn emit(rows: &[ReportRow], format: Format) -> String {
    match format {
        Format::Csv => emit_csv(rows),
        Format::Table => emit_table(rows),
        Format::Json => {
            let items: Vec<JsonRow> = rows.iter().map(JsonRow::from).collect();
            let mut s = serde_json::to_string_pretty(&items).expect("rows serialize");
            s.push('\n');
            s
        }
    }
}

fn emit_csv(rows: &[ReportRow]) -> String {
    let mut out = CSV_HEADER.join(",");
    out.push('\n');
    for r in rows {
        out.push_str(&r.cells().join(","));
        out.push('\n');
    }
    out
}

fn emit_table(rows: &[ReportRow]) -> String {
    let cells: Vec<[String; 14]> = rows.iter().map(ReportRow::cells).collect();
    let mut width: Vec<usize> = CSV_HEADER.iter().map(|h| h.len()).collect();
    for row in &cells {
        for (w, c) in width.iter_mut().zip(row) {
            *w = (*w).max(c.len());
        }
    }
    let mut out = String::new();
    let line = |out: &mut String, items: &mut dyn Iterator<Item = &str>| {
        let parts: Vec<String> = items
            .zip(&width)
            .enumerate()
            .map(|(i, (c, &w))| {
                if i == 0 {
                    format!("{c:<w$}")
                } else {
                    format!("{c:>w$}")
                }
            })
            .collect();
        let _ = writeln!(out, "{}", parts.join("  ").trim_end());
    };
    line(&mut out, &mut CSV_HEADER.iter().copied());
    for row in &cells {
        line(&mut out, &mut row.iter().map(String::as_str));
    }
    let mut fields: Vec<&str> = rows
        .iter()
        .map(|r| r.valid_over.as_str())
        .filter(|s| !s.is_empty())
        .collect();
    fields.dedup();
    for f in fields {
        let _ = writeln!(out, "verdicts hold over the {f}");
    }
    out
}

/// 2 if any row is an error, else 1 if any test timed out, else 0.
pub fn exit_code(rows: &[ReportRow]) -> i32 {
    if rows.iter().any(ReportRow::is_error) {
        2
    } else if rows.iter().any(ReportRow::has_timeout) {
        1
    } else {
        0
    }
}
