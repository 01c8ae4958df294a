//! Tabular reports (CSV plus a JSON mirror with a meta block) and two-column
//! plot series.

use std::fmt;
use std::fs;
use std::path::Path;
use std::time::{SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};

use crate::error::LabError;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Value {
    Bool(bool),
    Int(i64),
    Num(f64),
    Text(String),
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Bool(b) => write!(f, "{b}"),
            Value::Int(i) => write!(f, "{i}"),
            Value::Num(x) => write!(f, "{x:e}"),
            Value::Text(s) => f.write_str(s),
        }
    }
}

impl Value {
    /// Inverse of `Display` for CSV cells.
    pub fn parse(cell: &str) -> Value {
        match cell {
            "true" => return Value::Bool(true),
            "false" => return Value::Bool(false),
            _ => {}
        }
        if let Ok(i) = cell.parse::<i64>() {
            return Value::Int(i);
        }
        if let Ok(x) = cell.parse::<f64>() {
            return Value::Num(x);
        }
        Value::Text(cell.to_string())
    }

    pub fn as_f64(&self) -> Option<f64> {
        match self {
            Value::Int(i) => Some(*i as f64),
            Value::Num(x) => Some(*x),
            _ => None,
        }
    }
}

impl From<f64> for Value {
    fn from(x: f64) -> Self {
        Value::Num(x)
    }
}

impl From<usize> for Value {
    fn from(x: usize) -> Self {
        Value::Int(x as i64)
    }
}

impl From<bool> for Value {
    fn from(x: bool) -> Self {
        Value::Bool(x)
    }
}

impl From<&str> for Value {
    fn from(x: &str) -> Self {
        Value::Text(x.to_string())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Value>>,
}

impl Table {
    pub fn new(columns: &[&str]) -> Self {
        Table { columns: columns.iter().map(|c| c.to_string()).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<Value>) {
        assert_eq!(row.len(), self.columns.len(), "row width");
        self.rows.push(row);
    }

    pub fn column(&self, name: &str) -> Option<Vec<&Value>> {
        let j = self.columns.iter().position(|c| c == name)?;
        Some(self.rows.iter().map(|r| &r[j]).collect())
    }

    pub fn to_csv(&self) -> Result<String, LabError> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.columns).map_err(|e| LabError::io("<csv>", e))?;
        for row in &self.rows {
            w.write_record(row.iter().map(|v| v.to_string())).map_err(|e| LabError::io("<csv>", e))?;
        }
        let bytes = w.into_inner().map_err(|e| LabError::io("<csv>", e))?;
        Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
    }

    pub fn from_csv(text: &str) -> Result<Self, LabError> {
        let mut r = csv::Reader::from_reader(text.as_bytes());
        let columns = r.headers().map_err(|e| LabError::io("<csv>", e))?.iter().map(String::from).collect();
        let rows = r
            .records()
            .map(|rec| rec.map(|rec| rec.iter().map(Value::parse).collect()))
            .collect::<Result<_, _>>()
            .map_err(|e| LabError::io("<csv>", e))?;
        Ok(Table { columns, rows })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Meta {
    pub run: String,
    pub config_digest: String,
    /// Seconds since the Unix epoch.
    pub timestamp: u64,
    pub version: String,
    pub seed: u64,
}

impl Meta {
    pub fn now(run: &str, config_digest: String, seed: u64) -> Self {
        let timestamp = SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0);
        Meta { run: run.to_string(), config_digest, timestamp, version: env!("CARGO_PKG_VERSION").to_string(), seed }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub meta: Meta,
    /// Run-level scalars and flags.
    pub summary: serde_json::Map<String, serde_json::Value>,
    #[serde(flatten)]
    pub table: Table,
}

impl Report {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

/// Two-column plot data.
#[derive(Clone, Debug, PartialEq)]
pub struct Series {
    pub name: String,
    pub x: String,
    pub y: String,
    pub points: Vec<(f64, f64)>,
}

impl Series {
    pub fn new(name: &str, x: &str, y: &str, points: Vec<(f64, f64)>) -> Self {
        Series { name: name.into(), x: x.into(), y: y.into(), points }
    }

    pub fn to_table(&self) -> Table {
        let mut t = Table::new(&[&self.x, &self.y]);
        for &(x, y) in &self.points {
            t.push(vec![x.into(), y.into()]);
        }
        t
    }

    pub fn file_name(&self) -> String {
        format!("series_{}.csv", self.name)
    }
}

pub(crate) fn write(path: &Path, text: &str) -> Result<(), LabError> {
    fs::write(path, text).map_err(|e| LabError::io(path, e))
}
