//! Tables and their CSV/JSON encodings.
//!
//! Floats are rounded to 15 significant digits before they are written, so
//! the same table always produces the same bytes.

use std::io::Write;

use num_complex::Complex64;
use serde_json::{json, Map, Value};

use crate::config::{Format, RunConfig};
use crate::error::CliError;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Complex(Complex64),
    Real(f64),
    Int(i64),
    Text(String),
    Null,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Column {
    pub name: String,
    /// Written as `name_re,name_im` in CSV and `[re, im]` in JSON.
    pub complex: bool,
}

impl Column {
    pub fn real(name: &str) -> Self {
        Column { name: name.to_string(), complex: false }
    }

    pub fn complex(name: &str) -> Self {
        Column { name: name.to_string(), complex: true }
    }
}

#[derive(Debug, Clone)]
pub struct Report {
    pub config: RunConfig,
    pub tolerances: Value,
    pub flags: Vec<String>,
    pub columns: Vec<Column>,
    pub rows: Vec<Vec<Cell>>,
}

pub fn round15(x: f64) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return x;
    }
    format!("{x:.14e}").parse().unwrap_or(x)
}

pub fn format_float(x: f64) -> String {
    let x = round15(x);
    if x == 0.0 {
        "0".to_string()
    } else if (1e-5..1e15).contains(&x.abs()) {
        format!("{x}")
    } else {
        format!("{x:e}")
    }
}

fn json_float(x: f64) -> Value {
    serde_json::Number::from_f64(round15(x)).map(Value::Number).unwrap_or(Value::Null)
}

fn cell_json(cell: &Cell) -> Value {
    match cell {
        Cell::Complex(z) => json!([json_float(z.re), json_float(z.im)]),
        Cell::Real(x) => json_float(*x),
        Cell::Int(i) => json!(i),
        Cell::Text(s) => json!(s),
        Cell::Null => Value::Null,
    }
}

fn cell_fields(cell: &Cell, complex: bool) -> Vec<String> {
    match cell {
        Cell::Complex(z) => vec![format_float(z.re), format_float(z.im)],
        Cell::Real(x) => vec![format_float(*x)],
        Cell::Int(i) => vec![i.to_string()],
        Cell::Text(s) => vec![s.clone()],
        Cell::Null if complex => vec![String::new(), String::new()],
        Cell::Null => vec![String::new()],
    }
}

/// Rounds every float inside a JSON value.
fn round_value(v: &Value) -> Value {
    match v {
        Value::Number(n) if n.is_f64() => json_float(n.as_f64().unwrap_or(f64::NAN)),
        Value::Array(a) => Value::Array(a.iter().map(round_value).collect()),
        Value::Object(o) => Value::Object(o.iter().map(|(k, v)| (k.clone(), round_value(v))).collect()),
        other => other.clone(),
    }
}

impl Report {
    fn header_values(&self) -> Result<(Value, Value), CliError> {
        let config = serde_json::to_value(&self.config).map_err(|e| CliError::Io(e.to_string()))?;
        Ok((config, round_value(&self.tolerances)))
    }

    pub fn to_csv(&self) -> Result<Vec<u8>, CliError> {
        let (config, tolerances) = self.header_values()?;
        let mut out = Vec::new();
        writeln!(out, "# dkern {VERSION}").unwrap();
        writeln!(out, "# config: {config}").unwrap();
        writeln!(out, "# tolerances: {tolerances}").unwrap();
        if !self.flags.is_empty() {
            writeln!(out, "# flags: {}", self.flags.join(",")).unwrap();
        }
        let mut w = csv::Writer::from_writer(out);
        let names: Vec<String> = self
            .columns
            .iter()
            .flat_map(|c| if c.complex { vec![format!("{}_re", c.name), format!("{}_im", c.name)] } else { vec![c.name.clone()] })
            .collect();
        let io = |e: csv::Error| CliError::Io(e.to_string());
        w.write_record(&names).map_err(io)?;
        for row in &self.rows {
            let fields: Vec<String> =
                row.iter().zip(&self.columns).flat_map(|(cell, col)| cell_fields(cell, col.complex)).collect();
            w.write_record(&fields).map_err(io)?;
        }
        w.into_inner().map_err(|e| CliError::Io(e.to_string()))
    }

    pub fn to_json(&self) -> Result<Vec<u8>, CliError> {
        let (config, tolerances) = self.header_values()?;
        let rows: Vec<Value> = self
            .rows
            .iter()
            .map(|row| {
                let obj: Map<String, Value> =
                    row.iter().zip(&self.columns).map(|(cell, col)| (col.name.clone(), cell_json(cell))).collect();
                Value::Object(obj)
            })
            .collect();
        let doc = json!({
            "dkern": VERSION,
            "config": config,
            "tolerances": tolerances,
            "flags": self.flags,
            "columns": self.columns.iter().map(|c| c.name.clone()).collect::<Vec<_>>(),
            "rows": rows,
        });
        let mut out = serde_json::to_vec_pretty(&doc).map_err(|e| CliError::Io(e.to_string()))?;
        out.push(b'\n');
        Ok(out)
    }

    pub fn encode(&self, format: Format) -> Result<Vec<u8>, CliError> {
        match format {
            Format::Csv => self.to_csv(),
            Format::Json => self.to_json(),
        }
    }
}
