use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::Result;

/// Bumped whenever the JSON or CSV layout changes.
pub const SCHEMA_VERSION: u32 = 1;

/// Relative slack applied when a record compares `measured` with `bound`.
pub const RECORD_SLACK: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Relation {
    /// `measured <= bound`.
    AtMost,
    /// `measured >= bound`.
    AtLeast,
    /// Reported only; `ratio` is still `measured / bound`.
    Info,
}

/// One measured quantity and the bound it is compared with.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Record {
    pub series: String,
    pub index: u64,
    pub measured: f64,
    pub bound: Option<f64>,
    pub relation: Relation,
    pub ratio: Option<f64>,
    pub pass: Option<bool>,
}

impl Record {
    pub fn new(series: &str, index: u64, measured: f64, bound: Option<f64>, relation: Relation) -> Self {
        let mut r = Record {
            series: series.to_string(),
            index,
            measured,
            bound,
            relation,
            ratio: None,
            pass: None,
        };
        r.recompute();
        r
    }

    pub fn info(series: &str, index: u64, measured: f64) -> Self {
        Self::new(series, index, measured, None, Relation::Info)
    }

    /// Derives `ratio` and `pass` from `measured`, `bound` and `relation`.
    pub fn recompute(&mut self) {
        self.ratio = self.bound.map(|b| self.measured / b);
        self.pass = match (self.relation, self.bound) {
            (Relation::AtMost, Some(b)) => Some(self.measured <= b + RECORD_SLACK * b.abs()),
            (Relation::AtLeast, Some(b)) => Some(self.measured >= b - RECORD_SLACK * b.abs()),
            _ => None,
        };
    }
}

/// A named pass/fail verdict that is not tied to a single record.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub max_ratio: Option<f64>,
    pub fitted_constant: Option<f64>,
    pub monotone: Option<bool>,
    pub values: BTreeMap<String, f64>,
    pub checks: Vec<Check>,
}

/// Long-form plot data row.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlotPoint {
    pub x: f64,
    pub series: String,
    pub y: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub schema_version: u32,
    pub experiment: String,
    pub parameters: BTreeMap<String, Value>,
    pub records: Vec<Record>,
    pub summary: Summary,
    pub plot: Vec<PlotPoint>,
}

/// Which files [`ExperimentReport::write`] produces.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Json,
    Csv,
    Both,
}

fn number(v: f64) -> String {
    if v.is_finite() {
        format!("{v:e}")
    } else {
        v.to_string()
    }
}

impl ExperimentReport {
    pub fn new(experiment: &str) -> Self {
        Self {
            schema_version: SCHEMA_VERSION,
            experiment: experiment.to_string(),
            parameters: BTreeMap::new(),
            records: Vec::new(),
            summary: Summary::default(),
            plot: Vec::new(),
        }
    }

    pub fn param(&mut self, key: &str, value: impl Serialize) -> &mut Self {
        self.parameters
            .insert(key.to_string(), serde_json::to_value(value).unwrap_or(Value::Null));
        self
    }

    pub fn push(&mut self, record: Record) {
        self.records.push(record);
    }

    pub fn plot_point(&mut self, x: f64, series: &str, y: f64) {
        self.plot.push(PlotPoint {
            x,
            series: series.to_string(),
            y,
        });
    }

    pub fn check(&mut self, name: &str, passed: bool, detail: impl Into<String>) {
        self.summary.checks.push(Check {
            name: name.to_string(),
            passed,
            detail: detail.into(),
        });
    }

    pub fn value(&mut self, key: &str, v: f64) {
        self.summary.values.insert(key.to_string(), v);
    }

    /// Recomputes every record's verdict and the maximum ratio.
    pub fn finalize(&mut self) {
        for r in &mut self.records {
            r.recompute();
        }
        self.summary.max_ratio = self
            .records
            .iter()
            .filter_map(|r| r.ratio)
            .filter(|r| r.is_finite())
            .fold(None, |m: Option<f64>, r| Some(m.map_or(r, |m| m.max(r))));
    }

    pub fn failed_records(&self) -> impl Iterator<Item = &Record> {
        self.records.iter().filter(|r| r.pass == Some(false))
    }

    pub fn failed_checks(&self) -> impl Iterator<Item = &Check> {
        self.summary.checks.iter().filter(|c| !c.passed)
    }

    pub fn passed(&self) -> bool {
        self.failed_records().next().is_none() && self.failed_checks().next().is_none()
    }

    pub fn to_json(&self) -> Result<String> {
        let mut s = serde_json::to_string_pretty(self)?;
        s.push('\n');
        Ok(s)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    /// Per-record CSV: `index,series,measured,bound,ratio,pass`.
    pub fn records_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["index", "series", "measured", "bound", "ratio", "pass"])?;
        for r in &self.records {
            w.write_record([
                r.index.to_string(),
                r.series.clone(),
                number(r.measured),
                r.bound.map(number).unwrap_or_default(),
                r.ratio.map(number).unwrap_or_default(),
                r.pass.map(|p| p.to_string()).unwrap_or_default(),
            ])?;
        }
        Ok(String::from_utf8(w.into_inner().map_err(|e| crate::Error::Io(e.to_string()))?)
            .expect("csv output is utf-8"))
    }

    /// Long-form plot CSV: `x,series,y`.
    pub fn plot_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["x", "series", "y"])?;
        for p in &self.plot {
            w.write_record([number(p.x), p.series.clone(), number(p.y)])?;
        }
        Ok(String::from_utf8(w.into_inner().map_err(|e| crate::Error::Io(e.to_string()))?)
            .expect("csv output is utf-8"))
    }

    /// Writes `<experiment>.json`, `<experiment>.csv` and
    /// `<experiment>_plot.csv` into `dir` as selected by `format`.
    pub fn write(&self, dir: &Path, format: OutputFormat) -> Result<Vec<PathBuf>> {
        fs::create_dir_all(dir)?;
        let mut written = Vec::new();
        if matches!(format, OutputFormat::Json | OutputFormat::Both) {
            let path = dir.join(format!("{}.json", self.experiment));
            fs::write(&path, self.to_json()?)?;
            written.push(path);
        }
        if matches!(format, OutputFormat::Csv | OutputFormat::Both) {
            let path = dir.join(format!("{}.csv", self.experiment));
            fs::write(&path, self.records_csv()?)?;
            written.push(path);
            let path = dir.join(format!("{}_plot.csv", self.experiment));
            fs::write(&path, self.plot_csv()?)?;
            written.push(path);
        }
        Ok(written)
    }

    /// One line per failed record or check, for terminal output.
    pub fn failure_summary(&self) -> String {
        let mut out = String::new();
        for r in self.failed_records() {
            let _ = writeln!(
                out,
                "{} [{}]: measured {} vs bound {} ({:?})",
                r.series,
                r.index,
                number(r.measured),
                r.bound.map(number).unwrap_or_default(),
                r.relation
            );
        }
        for c in self.failed_checks() {
            let _ = writeln!(out, "{}: {}", c.name, c.detail);
        }
        out
    }
}
