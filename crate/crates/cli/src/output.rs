use std::io::Write;

use renewal_kit::Rational;
use serde::ser::{SerializeMap, Serializer};
use serde::Serialize;
use serde_json::value::RawValue;

use crate::spec::{Format, RunSpec};
use crate::CliError;

pub const RUN_PREFIX: &str = "# run: ";

/// One output value.
#[derive(Clone, Debug, PartialEq)]
pub enum Cell {
    Int(u64),
    Exact(Rational),
    Float(f64),
    Text(String),
    Bool(bool),
    Null,
}

impl From<usize> for Cell {
    fn from(n: usize) -> Self {
        Cell::Int(n as u64)
    }
}

impl From<u64> for Cell {
    fn from(n: u64) -> Self {
        Cell::Int(n)
    }
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Float(x)
    }
}

impl From<bool> for Cell {
    fn from(b: bool) -> Self {
        Cell::Bool(b)
    }
}

impl From<&str> for Cell {
    fn from(s: &str) -> Self {
        Cell::Text(s.to_string())
    }
}

impl From<String> for Cell {
    fn from(s: String) -> Self {
        Cell::Text(s)
    }
}

impl From<Option<f64>> for Cell {
    fn from(x: Option<f64>) -> Self {
        x.map_or(Cell::Null, Cell::Float)
    }
}

/// `"num/den"`, with the denominator always written.
pub fn format_rational(r: &Rational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

/// 17 significant digits, so every double reads back unchanged.
pub fn format_float(x: f64) -> String {
    if x.is_nan() {
        "nan".into()
    } else if x.is_infinite() {
        if x > 0.0 { "inf" } else { "-inf" }.into()
    } else {
        format!("{x:.16e}")
    }
}

impl Cell {
    fn text(&self) -> String {
        match self {
            Cell::Int(n) => n.to_string(),
            Cell::Exact(r) => format_rational(r),
            Cell::Float(x) => format_float(*x),
            Cell::Text(s) => s.clone(),
            Cell::Bool(b) => b.to_string(),
            Cell::Null => String::new(),
        }
    }
}

impl Serialize for Cell {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            Cell::Int(n) => s.serialize_u64(*n),
            Cell::Exact(r) => s.serialize_str(&format_rational(r)),
            Cell::Float(x) if x.is_finite() => {
                let raw = RawValue::from_string(format_float(*x)).map_err(serde::ser::Error::custom)?;
                raw.serialize(s)
            }
            Cell::Float(x) => s.serialize_str(&format_float(*x)),
            Cell::Text(t) => s.serialize_str(t),
            Cell::Bool(b) => s.serialize_bool(*b),
            Cell::Null => s.serialize_none(),
        }
    }
}

struct Fields<'a>(&'a [(&'a str, Cell)]);

impl Serialize for Fields<'_> {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut map = s.serialize_map(Some(self.0.len()))?;
        for (k, v) in self.0 {
            map.serialize_entry(k, v)?;
        }
        map.end()
    }
}

struct Row<'a> {
    columns: &'a [&'static str],
    cells: &'a [Cell],
}

impl Serialize for Row<'_> {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut map = s.serialize_map(Some(self.columns.len()))?;
        for (k, v) in self.columns.iter().zip(self.cells) {
            map.serialize_entry(k, v)?;
        }
        map.end()
    }
}

/// A run's output: summary fields plus one table.
#[derive(Debug)]
pub struct Document {
    pub summary: Vec<(&'static str, Cell)>,
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
}

impl Document {
    pub fn new(columns: Vec<&'static str>) -> Self {
        Self {
            summary: Vec::new(),
            columns,
            rows: Vec::new(),
        }
    }

    pub fn field(&mut self, key: &'static str, value: impl Into<Cell>) {
        self.summary.push((key, value.into()));
    }

    pub fn row(&mut self, cells: Vec<Cell>) {
        debug_assert_eq!(cells.len(), self.columns.len());
        self.rows.push(cells);
    }

    pub fn write(&self, run: &RunSpec, out: &mut dyn Write) -> Result<(), CliError> {
        let run_json = serde_json::to_string(run).map_err(|e| CliError::Io(e.to_string()))?;
        match run.format {
            Format::Json => {
                let rows: Vec<Row> = self
                    .rows
                    .iter()
                    .map(|cells| Row {
                        columns: &self.columns,
                        cells,
                    })
                    .collect();
                let mut map = serde_json::Serializer::new(&mut *out);
                let mut m = map.serialize_map(Some(3)).map_err(io_err)?;
                m.serialize_entry("run", run).map_err(io_err)?;
                m.serialize_entry("summary", &Fields(&self.summary)).map_err(io_err)?;
                m.serialize_entry("rows", &rows).map_err(io_err)?;
                SerializeMap::end(m).map_err(io_err)?;
                writeln!(out).map_err(io_err)?;
            }
            Format::Csv => {
                writeln!(out, "{RUN_PREFIX}{run_json}").map_err(io_err)?;
                for (k, v) in &self.summary {
                    writeln!(out, "# {k}: {}", v.text()).map_err(io_err)?;
                }
                let mut w = csv::Writer::from_writer(&mut *out);
                w.write_record(&self.columns).map_err(io_err)?;
                for cells in &self.rows {
                    w.write_record(cells.iter().map(Cell::text)).map_err(io_err)?;
                }
                w.flush().map_err(io_err)?;
            }
        }
        Ok(())
    }
}

fn io_err(e: impl std::fmt::Display) -> CliError {
    CliError::Io(e.to_string())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn floats_round_trip_with_17_digits() {
        for x in [2.0 / 3.0, 0.1, 1e-300, -7.5, 0.0] {
            let s = format_float(x);
            assert_eq!(s.parse::<f64>().unwrap(), x);
            assert_eq!(s.split('e').next().unwrap().chars().filter(char::is_ascii_digit).count(), 17);
        }
    }

    #[test]
    fn rationals_keep_their_denominator() {
        let one = Rational::from_integer(1.into());
        assert_eq!(format_rational(&one), "1/1");
        assert_eq!(serde_json::to_string(&Cell::Exact(one)).unwrap(), "\"1/1\"");
        assert_eq!(serde_json::to_string(&Cell::Float(0.5)).unwrap(), "5.0000000000000000e-1");
        assert_eq!(serde_json::to_string(&Cell::Float(f64::INFINITY)).unwrap(), "\"inf\"");
    }
}
