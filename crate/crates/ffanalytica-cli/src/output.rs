//! Tabular results: CSV with a sidecar schema, or a single JSON record.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::{Path, PathBuf};

use ffanalytica::Complex64;
use serde::Serialize;
use serde_json::{json, Value};

use crate::error::{CliError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Kind {
    Int,
    Float,
    Str,
    Bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct Column {
    pub name: String,
    pub kind: Kind,
    pub doc: String,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Int(i128),
    Float(f64),
    Str(String),
    Bool(bool),
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::Int(v) => v.to_string(),
            // shortest round-trip form, stable across runs
            Cell::Float(v) => format!("{v:?}"),
            Cell::Str(s) => s.clone(),
            Cell::Bool(b) => b.to_string(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Int(v) => i64::try_from(*v).map_or_else(|_| json!(v.to_string()), |x| json!(x)),
            Cell::Float(v) if v.is_finite() => json!(v),
            Cell::Float(v) => json!(v.to_string()),
            Cell::Str(s) => json!(s),
            Cell::Bool(b) => json!(b),
        }
    }
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Float(v)
    }
}
impl From<bool> for Cell {
    fn from(v: bool) -> Self {
        Cell::Bool(v)
    }
}
impl From<String> for Cell {
    fn from(v: String) -> Self {
        Cell::Str(v)
    }
}
impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Str(v.to_string())
    }
}
macro_rules! int_cell {
    ($($t:ty),*) => {$(impl From<$t> for Cell { fn from(v: $t) -> Self { Cell::Int(v as i128) } })*};
}
int_cell!(u8, u32, u64, u128, usize, i32, i64);

/// Rows under a fixed header. Complex values occupy a `_re`, `_im` column pair.
#[derive(Debug, Clone, Default)]
pub struct Table {
    pub columns: Vec<Column>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new() -> Table {
        Table::default()
    }

    pub fn col(mut self, name: &str, kind: Kind, doc: &str) -> Table {
        self.columns.push(Column { name: name.into(), kind, doc: doc.into() });
        self
    }

    pub fn complex(self, name: &str, doc: &str) -> Table {
        self.col(&format!("{name}_re"), Kind::Float, &format!("{doc} (real part)"))
            .col(&format!("{name}_im"), Kind::Float, &format!("{doc} (imaginary part)"))
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        assert_eq!(row.len(), self.columns.len(), "row width must match the header");
        self.rows.push(row);
    }

    pub fn write_csv(&self, w: impl Write) -> Result<()> {
        let mut out = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(w);
        out.write_record(self.columns.iter().map(|c| c.name.as_str()))?;
        for r in &self.rows {
            out.write_record(r.iter().map(Cell::csv))?;
        }
        out.flush()?;
        Ok(())
    }

    pub fn to_json_rows(&self) -> Value {
        Value::Array(
            self.rows
                .iter()
                .map(|r| Value::Object(self.columns.iter().zip(r).map(|(c, v)| (c.name.clone(), v.json())).collect()))
                .collect(),
        )
    }
}

pub fn cre(z: Complex64) -> Cell {
    Cell::Float(z.re)
}
pub fn cim(z: Complex64) -> Cell {
    Cell::Float(z.im)
}

/// A command's result: its rows plus summary values and exact enumeration counts.
#[derive(Debug)]
pub struct Report {
    pub command: String,
    pub inputs: Value,
    pub table: Table,
    pub values: BTreeMap<String, Value>,
    pub counts: BTreeMap<String, u128>,
    /// raised after the outputs are written
    pub failure: Option<CliError>,
}

impl Report {
    pub fn new(command: &str, inputs: Value, table: Table) -> Report {
        Report { command: command.into(), inputs, table, values: BTreeMap::new(), counts: BTreeMap::new(), failure: None }
    }

    pub fn fail(mut self, e: CliError) -> Report {
        self.failure = Some(e);
        self
    }

    pub fn value(mut self, k: &str, v: impl Serialize) -> Report {
        self.values.insert(k.into(), serde_json::to_value(v).unwrap_or(Value::Null));
        self
    }

    pub fn count(mut self, k: &str, v: impl Into<u128>) -> Report {
        self.counts.insert(k.into(), v.into());
        self
    }

    fn header(&self) -> Value {
        json!({
            "command": self.command,
            "version": env!("CARGO_PKG_VERSION"),
            "inputs": self.inputs,
            "values": self.values,
            "counts": self.counts.iter().map(|(k, v)| (k.clone(), json!(v.to_string()))).collect::<BTreeMap<_, _>>(),
        })
    }

    /// The sidecar: columns, inputs, values and counts. No timing, so it is reproducible.
    pub fn schema(&self) -> Value {
        let mut h = self.header();
        h["columns"] = serde_json::to_value(&self.table.columns).unwrap_or(Value::Null);
        h
    }

    /// The JSON record, including the runtime.
    pub fn json(&self, runtime_s: f64) -> Value {
        let mut h = self.header();
        h["runtime_s"] = json!(runtime_s);
        h["records"] = self.table.to_json_rows();
        h
    }
}

pub fn schema_path(out: &Path) -> PathBuf {
    let mut s = out.as_os_str().to_owned();
    s.push(".schema.json");
    PathBuf::from(s)
}
