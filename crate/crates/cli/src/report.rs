//! Tabular reports rendered as CSV or as a single JSON document.

use std::io::Write;

use serde_json::{json, Map, Value};

use crate::config::{OutputFormat, RunConfig};
use crate::CliError;

pub const SCHEMA_VERSION: u32 = 1;

/// Marker written for values that do not exist for a row.
pub const MISSING: &str = "NA";

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Float(f64),
    Int(i64),
    Text(String),
    Missing,
}

impl Cell {
    pub fn text(s: impl Into<String>) -> Self {
        Cell::Text(s.into())
    }

    pub fn opt(v: Option<f64>) -> Self {
        v.map_or(Cell::Missing, Cell::Float)
    }

    fn csv_field(&self) -> String {
        match self {
            // 13 significant digits, exponent form
            Cell::Float(v) => format!("{v:.12e}"),
            Cell::Int(v) => v.to_string(),
            Cell::Text(s) => s.clone(),
            Cell::Missing => MISSING.to_string(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Float(v) if v.is_finite() => json!(v),
            Cell::Float(v) => json!(v.to_string()),
            Cell::Int(v) => json!(v),
            Cell::Text(s) => json!(s),
            Cell::Missing => Value::Null,
        }
    }
}

#[derive(Debug, Clone)]
pub struct Report {
    pub command: &'static str,
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
    /// Human-readable lines for stderr.
    pub notes: Vec<String>,
    pub passed: bool,
}

impl Report {
    pub fn new(command: &'static str, columns: &[&'static str]) -> Self {
        Self {
            command,
            columns: columns.to_vec(),
            rows: Vec::new(),
            notes: Vec::new(),
            passed: true,
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        assert_eq!(row.len(), self.columns.len(), "row width");
        self.rows.push(row);
    }

    pub fn note(&mut self, line: impl Into<String>) {
        self.notes.push(line.into());
    }

    pub fn render(&self, config: &RunConfig) -> Result<Vec<u8>, CliError> {
        match config.format {
            OutputFormat::Csv => self.to_csv(config),
            OutputFormat::Json => self.to_json(config),
        }
    }

    /// Config as `# key = value` lines, then the header and rows.
    pub fn to_csv(&self, config: &RunConfig) -> Result<Vec<u8>, CliError> {
        let mut out = Vec::new();
        writeln!(out, "# command = {}", self.command).expect("write to vec");
        let cfg = toml::to_string(config).map_err(|e| CliError::Output(e.to_string()))?;
        for line in cfg.lines().filter(|l| !l.trim().is_empty()) {
            writeln!(out, "# {line}").expect("write to vec");
        }
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(out);
        w.write_record(&self.columns)
            .map_err(|e| CliError::Output(e.to_string()))?;
        for row in &self.rows {
            w.write_record(row.iter().map(Cell::csv_field))
                .map_err(|e| CliError::Output(e.to_string()))?;
        }
        w.into_inner().map_err(|e| CliError::Output(e.to_string()))
    }

    pub fn to_json(&self, config: &RunConfig) -> Result<Vec<u8>, CliError> {
        let mut cfg = serde_json::to_value(config).map_err(|e| CliError::Output(e.to_string()))?;
        cfg["command"] = json!(self.command);
        let rows: Vec<Value> = self
            .rows
            .iter()
            .map(|row| {
                let obj: Map<String, Value> = self
                    .columns
                    .iter()
                    .zip(row)
                    .map(|(c, v)| (c.to_string(), v.json()))
                    .collect();
                Value::Object(obj)
            })
            .collect();
        let doc = json!({
            "schema_version": SCHEMA_VERSION,
            "config": cfg,
            "rows": rows,
        });
        let mut out = serde_json::to_vec_pretty(&doc).map_err(|e| CliError::Output(e.to_string()))?;
        out.push(b'\n');
        Ok(out)
    }
}
