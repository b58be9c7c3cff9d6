//! Tabular output shared by every command.

use crate::config::Format;
use anyhow::Result;
use serde::ser::{SerializeMap, Serializer};
use serde::Serialize;

/// One table cell. Non-finite reals other than ±∞ and `Missing` render as an
/// empty CSV field and as JSON `null`.
#[derive(Clone, Debug, PartialEq)]
pub enum Cell {
    Real(f64),
    Int(i64),
    Text(String),
    Bool(bool),
    Missing,
}

impl Cell {
    pub fn opt_real(x: Option<f64>) -> Self {
        x.map_or(Cell::Missing, Cell::Real)
    }

    fn csv_field(&self) -> String {
        match self {
            Cell::Real(x) if x.is_nan() => String::new(),
            // 17 significant digits round-trip any f64
            Cell::Real(x) => format!("{x:.16e}"),
            Cell::Int(i) => i.to_string(),
            Cell::Text(s) => s.clone(),
            Cell::Bool(b) => b.to_string(),
            Cell::Missing => String::new(),
        }
    }
}

impl Serialize for Cell {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Cell::Real(x) if x.is_finite() => s.serialize_f64(*x),
            Cell::Real(x) if x.is_infinite() => s.serialize_str(if *x > 0.0 { "inf" } else { "-inf" }),
            Cell::Real(_) | Cell::Missing => s.serialize_none(),
            Cell::Int(i) => s.serialize_i64(*i),
            Cell::Text(t) => s.serialize_str(t),
            Cell::Bool(b) => s.serialize_bool(*b),
        }
    }
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Real(x)
    }
}

impl From<usize> for Cell {
    fn from(x: usize) -> Self {
        Cell::Int(x as i64)
    }
}

impl From<u64> for Cell {
    fn from(x: u64) -> Self {
        Cell::Int(x as i64)
    }
}

impl From<bool> for Cell {
    fn from(x: bool) -> Self {
        Cell::Bool(x)
    }
}

impl From<String> for Cell {
    fn from(x: String) -> Self {
        Cell::Text(x)
    }
}

impl From<&str> for Cell {
    fn from(x: &str) -> Self {
        Cell::Text(x.to_string())
    }
}

/// Rows under a fixed header.
#[derive(Clone, Debug, PartialEq)]
pub struct Table {
    pub columns: &'static [&'static str],
    pub rows: Vec<Vec<Cell>>,
}

struct Row<'a> {
    columns: &'a [&'static str],
    cells: &'a [Cell],
}

impl Serialize for Row<'_> {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut map = s.serialize_map(Some(self.columns.len()))?;
        for (c, v) in self.columns.iter().zip(self.cells) {
            map.serialize_entry(c, v)?;
        }
        map.end()
    }
}

impl Table {
    pub fn new(columns: &'static [&'static str]) -> Self {
        Self {
            columns,
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        assert_eq!(row.len(), self.columns.len(), "row width differs from header");
        self.rows.push(row);
    }

    /// Index of a column by name.
    pub fn column(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|&c| c == name)
    }

    pub fn to_csv(&self) -> Result<Vec<u8>> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(self.columns)?;
        for row in &self.rows {
            w.write_record(row.iter().map(Cell::csv_field))?;
        }
        Ok(w.into_inner().map_err(|e| e.into_error())?)
    }

    /// A JSON array with one object per row, keys in column order.
    pub fn to_json(&self) -> Result<Vec<u8>> {
        let rows: Vec<Row> = self
            .rows
            .iter()
            .map(|cells| Row {
                columns: self.columns,
                cells,
            })
            .collect();
        let mut out = serde_json::to_vec_pretty(&rows)?;
        out.push(b'\n');
        Ok(out)
    }

    pub fn render(&self, format: Format) -> Result<Vec<u8>> {
        match format {
            Format::Csv => self.to_csv(),
            Format::Json => self.to_json(),
        }
    }
}

/// Bits as a string of 0s and 1s.
pub fn bitstring(bits: &[bool]) -> String {
    bits.iter().map(|&b| if b { '1' } else { '0' }).collect()
}

/// Space-separated list.
pub fn joined<T: ToString>(items: &[T]) -> String {
    items.iter().map(T::to_string).collect::<Vec<_>>().join(" ")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> Table {
        let mut t = Table::new(&["x", "name", "flag", "gap"]);
        t.push(vec![0.1.into(), "a,b".into(), true.into(), Cell::Missing]);
        t.push(vec![f64::NAN.into(), "c".into(), false.into(), 3usize.into()]);
        t
    }

    #[test]
    fn csv_quotes_and_blanks() {
        let text = String::from_utf8(sample().to_csv().unwrap()).unwrap();
        assert_eq!(
            text,
            "x,name,flag,gap\n1.0000000000000001e-1,\"a,b\",true,\n,c,false,3\n"
        );
    }

    #[test]
    fn reals_round_trip() {
        for x in [0.1, 1.0 / 3.0, 5.699_573_451_357_313e-15, f64::MIN_POSITIVE, 1e300] {
            let s = Cell::Real(x).csv_field();
            assert_eq!(s.parse::<f64>().unwrap(), x, "{s}");
        }
    }

    #[test]
    fn json_keeps_column_order() {
        let v: serde_json::Value = serde_json::from_slice(&sample().to_json().unwrap()).unwrap();
        let first = v[0].as_object().unwrap();
        assert_eq!(first.len(), 4);
        assert_eq!(v[0]["gap"], serde_json::Value::Null);
        assert_eq!(v[1]["x"], serde_json::Value::Null);
        assert_eq!(v[1]["gap"], 3);
        let text = String::from_utf8(sample().to_json().unwrap()).unwrap();
        let (x, n) = (text.find("\"x\"").unwrap(), text.find("\"name\"").unwrap());
        assert!(x < n);
    }

    #[test]
    #[should_panic(expected = "row width")]
    fn rejects_ragged_rows() {
        Table::new(&["a"]).push(vec![]);
    }
}
