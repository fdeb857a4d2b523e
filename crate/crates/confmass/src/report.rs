//! Deterministic run reports. A run produces a flat list of records, one
//! per executed check; the same configuration must serialize to the same
//! bytes, so records carry no timestamps, paths, or durations, maps are
//! ordered, and floats print through the shortest round-trip form.

use std::collections::BTreeMap;
use std::str::FromStr;

use serde::Serialize;

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Json,
    Csv,
}

impl FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "json" => Ok(Format::Json),
            "csv" => Ok(Format::Csv),
            other => Err(Error::Usage(format!(
                "unknown format {other:?}; expected json or csv"
            ))),
        }
    }
}

/// One executed check. `anchor` names the statement the check exercises
/// ("Lemma 2.1", "Theorem 3.6", ...) or is "plumbing" for cross-checks of
/// the numerical machinery itself.
#[derive(Clone, Debug, Serialize)]
pub struct Record {
    pub id: String,
    pub anchor: String,
    pub inputs: BTreeMap<String, String>,
    pub values: BTreeMap<String, f64>,
    pub residual: Option<f64>,
    pub tolerance: Option<f64>,
    pub pass: bool,
}

impl Record {
    pub fn new(id: impl Into<String>, anchor: impl Into<String>) -> Self {
        Record {
            id: id.into(),
            anchor: anchor.into(),
            inputs: BTreeMap::new(),
            values: BTreeMap::new(),
            residual: None,
            tolerance: None,
            pass: true,
        }
    }

    pub fn input(mut self, key: &str, value: impl ToString) -> Self {
        self.inputs.insert(key.to_string(), value.to_string());
        self
    }

    pub fn value(mut self, key: &str, v: f64) -> Self {
        self.values.insert(key.to_string(), v);
        self
    }

    /// Verdict by comparison: pass when residual <= tolerance.
    pub fn check(mut self, residual: f64, tolerance: f64) -> Self {
        self.residual = Some(residual);
        self.tolerance = Some(tolerance);
        self.pass = residual <= tolerance;
        self
    }

    /// Verdict decided by the caller (boolean checks, negative controls).
    pub fn verdict(mut self, pass: bool) -> Self {
        self.pass = pass;
        self
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Environment {
    pub dimension: usize,
    pub quadrature_order: usize,
    pub schedule: String,
    pub tolerances: BTreeMap<String, f64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct Summary {
    pub total: usize,
    pub passed: usize,
    pub failed: usize,
    pub pass: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub command: String,
    pub suite: String,
    pub environment: Environment,
    pub records: Vec<Record>,
    pub summary: Summary,
}

impl Report {
    pub fn new(
        command: impl Into<String>,
        suite: impl Into<String>,
        environment: Environment,
        records: Vec<Record>,
    ) -> Self {
        let passed = records.iter().filter(|r| r.pass).count();
        let total = records.len();
        let summary = Summary {
            total,
            passed,
            failed: total - passed,
            pass: passed == total,
        };
        Report {
            command: command.into(),
            suite: suite.into(),
            environment,
            records,
            summary,
        }
    }

    pub fn to_json(&self) -> Result<String> {
        let mut s = serde_json::to_string_pretty(self)?;
        s.push('\n');
        Ok(s)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("id,anchor,pass,residual,tolerance,inputs,values\n");
        for r in &self.records {
            let inputs = r
                .inputs
                .iter()
                .map(|(k, v)| format!("{k}={v}"))
                .collect::<Vec<_>>()
                .join(";");
            let values = r
                .values
                .iter()
                .map(|(k, v)| format!("{k}={}", fmt_float(*v)))
                .collect::<Vec<_>>()
                .join(";");
            out.push_str(&format!(
                "{},{},{},{},{},{},{}\n",
                csv_field(&r.id),
                csv_field(&r.anchor),
                r.pass,
                r.residual.map(fmt_float).unwrap_or_default(),
                r.tolerance.map(fmt_float).unwrap_or_default(),
                csv_field(&inputs),
                csv_field(&values),
            ));
        }
        out
    }

    pub fn render(&self, format: Format) -> Result<String> {
        match format {
            Format::Json => self.to_json(),
            Format::Csv => Ok(self.to_csv()),
        }
    }

    /// One line per record, for the terminal.
    pub fn console_lines(&self) -> String {
        let mut out = String::new();
        for r in &self.records {
            let verdict = if r.pass { "pass" } else { "FAIL" };
            match (r.residual, r.tolerance) {
                (Some(res), Some(tol)) => out.push_str(&format!(
                    "{verdict}  {}  residual {} (tolerance {})\n",
                    r.id,
                    fmt_float(res),
                    fmt_float(tol)
                )),
                _ => out.push_str(&format!("{verdict}  {}\n", r.id)),
            }
        }
        out.push_str(&format!(
            "{}: {} of {} checks passed\n",
            if self.summary.pass { "ok" } else { "FAILED" },
            self.summary.passed,
            self.summary.total
        ));
        out
    }

    pub fn exit_code(&self) -> i32 {
        if self.summary.pass {
            0
        } else {
            1
        }
    }
}

/// Shortest round-trip decimal, as the JSON serializer prints it; the
/// non-finite values JSON cannot carry become "null" here too.
fn fmt_float(v: f64) -> String {
    if v.is_finite() {
        let mut buf = ryu_format(v);
        // trim the ".0" that ryu leaves on integral values for compactness
        if buf.ends_with(".0") {
            buf.truncate(buf.len() - 2);
        }
        buf
    } else {
        "null".to_string()
    }
}

fn ryu_format(v: f64) -> String {
    serde_json::to_string(&v).unwrap_or_else(|_| "null".to_string())
}

fn csv_field(s: &str) -> String {
    if s.contains(',') || s.contains('"') || s.contains('\n') {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}
