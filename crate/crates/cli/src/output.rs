//! Column tables and their CSV/JSON encodings.

use std::fs;
use std::path::{Path, PathBuf};

use serde_json::{Map, Value};

use crate::config::OutputFormat;
use crate::error::CliError;

/// Named numeric columns of equal length.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl Table {
    pub fn new<S: Into<String>>(columns: impl IntoIterator<Item = S>) -> Self {
        Self {
            columns: columns.into_iter().map(Into::into).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<f64>) {
        assert_eq!(row.len(), self.columns.len(), "row width must match the header");
        self.rows.push(row);
    }

    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let k = self.columns.iter().position(|c| c == name)?;
        Some(self.rows.iter().map(|r| r[k]).collect())
    }

    /// Header plus one line per row, every value with 17 significant digits.
    pub fn to_csv(&self) -> Vec<u8> {
        let mut w = csv::Writer::from_writer(Vec::new());
        let io = "writing to memory cannot fail";
        w.write_record(&self.columns).expect(io);
        for row in &self.rows {
            w.write_record(row.iter().map(|v| format!("{v:.16e}"))).expect(io);
        }
        w.into_inner().expect(io)
    }

    /// `{"column": [values...], ...}` in header order.
    pub fn to_json(&self) -> Value {
        let mut m = Map::new();
        for (k, name) in self.columns.iter().enumerate() {
            let col = self.rows.iter().map(|r| json_number(r[k])).collect();
            m.insert(name.clone(), Value::Array(col));
        }
        Value::Object(m)
    }
}

/// Non-finite values have no JSON number form and become null.
pub fn json_number(v: f64) -> Value {
    serde_json::Number::from_f64(v).map_or(Value::Null, Value::Number)
}

pub fn write_file(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    fs::write(path, bytes).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

pub fn ensure_dir(dir: &Path) -> Result<(), CliError> {
    fs::create_dir_all(dir).map_err(|source| CliError::Io {
        path: dir.to_path_buf(),
        source,
    })
}

/// Writes `<stem>.csv` or `<stem>.json` into `dir` and returns the path.
pub fn write_table(dir: &Path, stem: &str, table: &Table, format: OutputFormat) -> Result<PathBuf, CliError> {
    let path = dir.join(format!("{stem}.{}", format.extension()));
    let bytes = match format {
        OutputFormat::Csv => table.to_csv(),
        OutputFormat::Json => pretty(&table.to_json()),
    };
    write_file(&path, &bytes)?;
    Ok(path)
}

pub fn write_json(dir: &Path, name: &str, value: &Value) -> Result<PathBuf, CliError> {
    let path = dir.join(name);
    write_file(&path, &pretty(value))?;
    Ok(path)
}

fn pretty(v: &Value) -> Vec<u8> {
    let mut out = serde_json::to_vec_pretty(v).expect("JSON values always serialize");
    out.push(b'\n');
    out
}
