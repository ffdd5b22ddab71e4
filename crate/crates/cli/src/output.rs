use std::io::Write;

use serde_json::{Map, Value};

use crate::args::{Format, Output};

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Int(i64),
    Float(f64),
    Text(String),
    Missing,
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as i64)
    }
}

impl From<u64> for Cell {
    fn from(v: u64) -> Self {
        Cell::Int(v as i64)
    }
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Float(v)
    }
}

impl From<Option<f64>> for Cell {
    fn from(v: Option<f64>) -> Self {
        v.map_or(Cell::Missing, Cell::Float)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.to_owned())
    }
}

impl From<String> for Cell {
    fn from(v: String) -> Self {
        Cell::Text(v)
    }
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::Int(v) => v.to_string(),
            // 17 significant digits: enough to round-trip any f64
            Cell::Float(v) if v.is_finite() => format!("{v:.16e}"),
            Cell::Float(v) => v.to_string(),
            Cell::Text(s) => s.clone(),
            Cell::Missing => String::new(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Int(v) => Value::from(*v),
            Cell::Float(v) => serde_json::Number::from_f64(*v).map_or(Value::Null, Value::Number),
            Cell::Text(s) => Value::from(s.as_str()),
            Cell::Missing => Value::Null,
        }
    }
}

pub struct Table {
    columns: Vec<&'static str>,
    rows: Vec<Vec<Cell>>,
    meta: Map<String, Value>,
}

impl Table {
    pub fn new(command: &str, columns: &[&'static str]) -> Self {
        let mut meta = Map::new();
        meta.insert("command".into(), command.into());
        meta.insert("version".into(), env!("CARGO_PKG_VERSION").into());
        Self {
            columns: columns.to_vec(),
            rows: Vec::new(),
            meta,
        }
    }

    /// Adds a `meta` entry (JSON output only).
    pub fn meta(&mut self, key: &str, value: impl Into<Value>) {
        self.meta.insert(key.into(), value.into());
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    fn to_csv(&self) -> std::io::Result<Vec<u8>> {
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(Vec::new());
        w.write_record(&self.columns)?;
        for row in &self.rows {
            w.write_record(row.iter().map(Cell::csv))?;
        }
        w.into_inner().map_err(|e| e.into_error())
    }

    fn to_json(&self) -> Vec<u8> {
        let rows: Vec<Value> = self
            .rows
            .iter()
            .map(|row| {
                let obj: Map<String, Value> = self
                    .columns
                    .iter()
                    .zip(row)
                    .map(|(c, v)| ((*c).to_owned(), v.json()))
                    .collect();
                Value::Object(obj)
            })
            .collect();
        let mut doc = Map::new();
        doc.insert("meta".into(), Value::Object(self.meta.clone()));
        doc.insert("rows".into(), Value::Array(rows));
        let mut bytes = serde_json::to_vec_pretty(&Value::Object(doc)).expect("JSON values serialize");
        bytes.push(b'\n');
        bytes
    }

    pub fn write(&self, output: &Output) -> std::io::Result<()> {
        let bytes = match output.format {
            Format::Csv => self.to_csv()?,
            Format::Json => self.to_json(),
        };
        match &output.out {
            Some(path) => std::fs::write(path, bytes),
            None => {
                let mut out = std::io::stdout().lock();
                out.write_all(&bytes)?;
                out.flush()
            }
        }
    }
}
