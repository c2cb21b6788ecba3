//! Column tables and their CSV/JSON forms.
//!
//! Floats are written with 17 significant digits in CSV and shortest
//! round-trip form in JSON, so reading a file back recovers every value
//! bit for bit. Non-finite values become the strings `inf`, `-inf`, `NaN`.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use fmd_core::{density_histogram, MassFunction, PredictiveVector};
use serde_json::{Map, Value};

use crate::error::{CliError, Result};

/// Linear masses below this are written as zero.
pub const LINEAR_FLOOR: f64 = 1e-300;

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Int(u64),
    Num(f64),
    Text(String),
    Missing,
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::Int(v) => v.to_string(),
            Cell::Num(v) => format!("{v:.16e}"),
            Cell::Text(s) if s.contains([',', '"', '\n']) => format!("\"{}\"", s.replace('"', "\"\"")),
            Cell::Text(s) => s.clone(),
            Cell::Missing => String::new(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Int(v) => Value::from(*v),
            Cell::Num(v) if v.is_finite() => Value::from(*v),
            Cell::Num(v) => Value::from(format!("{v}")),
            Cell::Text(s) => Value::from(s.as_str()),
            Cell::Missing => Value::Null,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(columns: &[&str]) -> Self {
        Table { columns: columns.iter().map(|c| c.to_string()).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn column(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c == name)
    }

    pub fn to_csv(&self) -> String {
        let mut out = self.columns.join(",");
        out.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(Cell::csv).collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }

    pub fn to_json(&self) -> Value {
        Value::Array(
            self.rows
                .iter()
                .map(|row| {
                    let record: Map<String, Value> =
                        self.columns.iter().cloned().zip(row.iter().map(Cell::json)).collect();
                    Value::Object(record)
                })
                .collect(),
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

impl Format {
    pub fn extension(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
        }
    }
}

/// A named set of tables as one document. A single table is written bare;
/// several become `# name` sections (CSV) or an object keyed by name (JSON).
pub fn render(tables: &[(String, Table)], format: Format) -> String {
    match format {
        Format::Csv if tables.len() == 1 => tables[0].1.to_csv(),
        Format::Csv => {
            let mut out = String::new();
            for (i, (name, table)) in tables.iter().enumerate() {
                if i > 0 {
                    out.push('\n');
                }
                let _ = writeln!(out, "# {name}");
                out.push_str(&table.to_csv());
            }
            out
        }
        Format::Json => {
            let value = if tables.len() == 1 {
                tables[0].1.to_json()
            } else {
                Value::Object(tables.iter().map(|(name, t)| (name.clone(), t.to_json())).collect())
            };
            let mut text = serde_json::to_string_pretty(&value).expect("tables serialize");
            text.push('\n');
            text
        }
    }
}

/// Writes the tables to `path`. Several CSV tables go to `path/<name>.csv`.
pub fn write(tables: &[(String, Table)], format: Format, path: &Path) -> Result<()> {
    let io = |source| CliError::Io { path: path.to_path_buf(), source };
    if format == Format::Csv && tables.len() > 1 {
        fs::create_dir_all(path).map_err(io)?;
        for (name, table) in tables {
            let file = path.join(format!("{name}.csv"));
            fs::write(&file, table.to_csv()).map_err(|source| CliError::Io { path: file.clone(), source })?;
        }
        return Ok(());
    }
    fs::write(path, render(tables, format)).map_err(io)
}

fn linear(ln: f64) -> f64 {
    let v = ln.exp();
    if v < LINEAR_FLOOR {
        0.0
    } else {
        v
    }
}

/// `a, abscissa, p_aN, q_aNp1, density` for `S_{N+1}`. With `log` the last
/// two columns hold natural logs and are named `ln_q_aNp1`, `ln_density`.
/// `p_aN` is empty on the final row, where no predictive entry exists.
pub fn mass_table(q: &MassFunction, p: Option<&PredictiveVector>, log: bool) -> Table {
    let columns: &[&str] = if log {
        &["a", "abscissa", "p_aN", "ln_q_aNp1", "ln_density"]
    } else {
        &["a", "abscissa", "p_aN", "q_aNp1", "density"]
    };
    let mut table = Table::new(columns);
    let nplus1 = q.nplus1();
    let ln_bins = ((nplus1 + 1) as f64).ln();
    let hist = density_histogram(q);
    for a in 0..=nplus1 {
        let pa = match p {
            Some(p) if a < nplus1 => Cell::Num(p.get(a)),
            _ => Cell::Missing,
        };
        let ln_q = q.ln(a);
        let (mass, density) = if log {
            (ln_q, ln_q + ln_bins)
        } else {
            (linear(ln_q), if linear(ln_q) == 0.0 { 0.0 } else { hist.densities[a] })
        };
        table.push(vec![
            Cell::Int(a as u64),
            Cell::Num(hist.bin_centers[a]),
            pa,
            Cell::Num(mass),
            Cell::Num(density),
        ]);
    }
    table
}

/// `a, a_over_N, p_aN`.
pub fn predictive_table(p: &PredictiveVector) -> Table {
    let mut table = Table::new(&["a", "a_over_N", "p_aN"]);
    let n = p.n() as f64;
    for (a, &v) in p.values().iter().enumerate() {
        table.push(vec![Cell::Int(a as u64), Cell::Num(a as f64 / n), Cell::Num(v)]);
    }
    table
}

fn parse_float(text: &str) -> Option<f64> {
    match text.trim().trim_matches('"') {
        "-inf" => Some(f64::NEG_INFINITY),
        "inf" => Some(f64::INFINITY),
        t => t.parse().ok(),
    }
}

/// Reads a mass table written by [`mass_table`] (CSV or JSON, linear or
/// log) and rebuilds the mass function.
pub fn read_mass(path: &Path) -> Result<MassFunction> {
    let text = fs::read_to_string(path).map_err(|source| CliError::Io { path: path.to_path_buf(), source })?;
    let bad = |line: usize, why: &str| CliError::Validation(format!("{}:{line}: {why}", path.display()));
    let (values, log) = if text.trim_start().starts_with('[') {
        let rows: Vec<Map<String, Value>> =
            serde_json::from_str(&text).map_err(|e| bad(e.line(), &e.to_string()))?;
        let log = rows.first().is_some_and(|r| r.contains_key("ln_q_aNp1"));
        let key = if log { "ln_q_aNp1" } else { "q_aNp1" };
        let mut values = Vec::with_capacity(rows.len());
        for (i, row) in rows.iter().enumerate() {
            let v = match row.get(key) {
                Some(Value::Number(n)) => n.as_f64(),
                Some(Value::String(s)) => parse_float(s),
                _ => None,
            };
            values.push(v.ok_or_else(|| bad(i + 1, &format!("record {i} has no numeric {key}")))?);
        }
        (values, log)
    } else {
        let mut lines = text.lines();
        let header: Vec<&str> = lines.next().unwrap_or_default().split(',').collect();
        let (col, log) = match header.iter().position(|c| *c == "ln_q_aNp1") {
            Some(i) => (i, true),
            None => (header.iter().position(|c| *c == "q_aNp1").ok_or_else(|| bad(1, "no q_aNp1 column"))?, false),
        };
        let mut values = Vec::new();
        for (i, line) in lines.enumerate().filter(|(_, l)| !l.is_empty()) {
            let field = line.split(',').nth(col).ok_or_else(|| bad(i + 2, "short row"))?;
            values.push(parse_float(field).ok_or_else(|| bad(i + 2, &format!("not a number: {field}")))?);
        }
        (values, log)
    };
    Ok(if log { MassFunction::from_log(values)? } else { MassFunction::from_linear(&values)? })
}
