use std::io::Write;

use serde_json::{json, Map, Value as Json};

use crate::config::Config;
use crate::LabError;

/// One report cell.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Cell {
    Float(f64),
    Int(u64),
    /// Not computed for this row (e.g. a circuit too large to simulate).
    Missing,
}

impl Cell {
    /// Text form used in CSV: 17 significant digits for floats.
    pub fn to_csv(self) -> String {
        match self {
            Cell::Float(x) if x.is_finite() => format!("{x:.16e}"),
            Cell::Float(x) => format!("{x}"),
            Cell::Int(n) => n.to_string(),
            Cell::Missing => String::new(),
        }
    }

    fn to_json(self) -> Json {
        match self {
            Cell::Float(x) => serde_json::Number::from_f64(x).map_or(Json::Null, Json::Number),
            Cell::Int(n) => json!(n),
            Cell::Missing => Json::Null,
        }
    }
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Float(x)
    }
}

impl From<usize> for Cell {
    fn from(n: usize) -> Self {
        Cell::Int(n as u64)
    }
}

impl<T: Into<Cell>> From<Option<T>> for Cell {
    fn from(v: Option<T>) -> Self {
        v.map_or(Cell::Missing, Into::into)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub command: &'static str,
    pub columns: &'static [&'static str],
    pub rows: Vec<Vec<Cell>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

impl Report {
    pub fn new(command: &'static str, columns: &'static [&'static str]) -> Self {
        Report { command, columns, rows: Vec::new() }
    }

    pub fn column(&self, name: &str) -> Option<Vec<Cell>> {
        let i = self.columns.iter().position(|c| *c == name)?;
        Some(self.rows.iter().map(|r| r[i]).collect())
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<(), LabError> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(self.columns)?;
        for row in &self.rows {
            w.write_record(row.iter().map(|c| c.to_csv()))?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn to_json(&self, cfg: &Config) -> Json {
        let rows: Vec<Json> = self
            .rows
            .iter()
            .map(|row| {
                let obj: Map<String, Json> =
                    self.columns.iter().zip(row).map(|(c, v)| (c.to_string(), v.to_json())).collect();
                Json::Object(obj)
            })
            .collect();
        json!({ "command": self.command, "config": cfg, "rows": rows })
    }

    pub fn write<W: Write>(&self, format: Format, cfg: &Config, mut out: W) -> Result<(), LabError> {
        match format {
            Format::Csv => self.write_csv(out),
            Format::Json => {
                serde_json::to_writer_pretty(&mut out, &self.to_json(cfg))?;
                writeln!(out)?;
                Ok(())
            }
        }
    }
}
