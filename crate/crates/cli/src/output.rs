use std::io::Write;

use serde::Serialize;
use serde_json::{Map, Value};

use saext_core::{Complex64, UnitSystem};

use crate::error::CliError;

/// Where the effective tolerance came from.
#[derive(Debug, Clone, Copy, Serialize, PartialEq)]
#[serde(rename_all = "snake_case")]
pub enum TolSource {
    Flag,
    Env,
    Default,
}

#[derive(Debug, Clone, Serialize)]
pub struct Tolerances {
    pub tol: f64,
    pub source: TolSource,
}

#[derive(Debug, Clone, Serialize)]
pub struct RunManifest {
    pub command_line: Vec<String>,
    pub params: Value,
    pub units: UnitSystem,
    pub tolerances: Tolerances,
    pub version: String,
    pub wall_time_s: f64,
}

#[derive(Debug, Clone, Default)]
pub struct Table {
    pub headers: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new<S: AsRef<str>>(headers: &[S]) -> Self {
        Table { headers: headers.iter().map(|h| h.as_ref().to_string()).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<String>) {
        self.rows.push(row);
    }

    /// One row holding every scalar leaf of `obj`, keyed by dotted path.
    pub fn from_scalars(obj: &Map<String, Value>) -> Self {
        let mut cells = Vec::new();
        flatten("", obj, &mut cells);
        Table {
            headers: cells.iter().map(|(k, _)| k.clone()).collect(),
            rows: vec![cells.into_iter().map(|(_, v)| v).collect()],
        }
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<(), CliError> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(&self.headers)?;
        for row in &self.rows {
            w.write_record(row)?;
        }
        w.flush()?;
        Ok(())
    }
}

pub fn flatten(prefix: &str, obj: &Map<String, Value>, cells: &mut Vec<(String, String)>) {
    for (k, v) in obj {
        let key = if prefix.is_empty() { k.clone() } else { format!("{prefix}.{k}") };
        match v {
            Value::Object(inner) => flatten(&key, inner, cells),
            Value::Array(_) => {}
            other => cells.push((key, scalar(other))),
        }
    }
}

pub fn scalar(v: &Value) -> String {
    match v {
        Value::Null => String::new(),
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

/// Shortest round-trip form, matching the JSON output.
pub fn fmt_f64(x: f64) -> String {
    if x.is_finite() {
        Value::from(x).to_string()
    } else {
        format!("{x}")
    }
}

/// Result of one subcommand: the JSON payload and its CSV projection.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub json: Map<String, Value>,
    pub table: Table,
    /// Set when the command ran but some part of it failed, including a
    /// `within_tol: false` self-check.
    pub failed: bool,
}

impl Outcome {
    pub fn new(json: Map<String, Value>) -> Self {
        let table = Table::from_scalars(&json);
        Self::with_table(json, table)
    }

    pub fn with_table(json: Map<String, Value>, table: Table) -> Self {
        let failed = json.get("within_tol") == Some(&Value::Bool(false));
        Outcome { json, table, failed }
    }
}

pub fn cplx(z: Complex64) -> Value {
    serde_json::json!({ "re": z.re, "im": z.im })
}
