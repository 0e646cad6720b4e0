//! Table and JSON rendering for command results.

use std::io::{self, Write};

use clap::ValueEnum;
use serde_json::{Map, Value};

use crate::table::JointDistribution;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Table,
    Json,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Int(i64),
    Bool(bool),
    Text(String),
}

/// Rounds to 12 significant digits.
pub fn round12(x: f64) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return if x == 0.0 { 0.0 } else { x };
    }
    format!("{x:.11e}").parse().unwrap_or(x)
}

/// 12 significant digits, shortest form.
pub fn num12(x: f64) -> String {
    let r = round12(x);
    if r == 0.0 {
        "0".into()
    } else if r.is_finite() && (r.abs() < 1e-6 || r.abs() >= 1e15) {
        format!("{r:e}")
    } else {
        format!("{r}")
    }
}

/// Eigenvalue with an explicit sign, as in "+1".
pub fn signed(x: f64) -> String {
    let s = num12(x);
    if round12(x) > 0.0 {
        format!("+{s}")
    } else {
        s
    }
}

impl Cell {
    fn text(&self) -> String {
        match self {
            Cell::Num(x) => num12(*x),
            Cell::Int(i) => i.to_string(),
            Cell::Bool(b) => b.to_string(),
            Cell::Text(s) => s.clone(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Num(x) => {
                let r = round12(*x);
                serde_json::Number::from_f64(r).map_or_else(|| Value::String(num12(r)), Value::Number)
            }
            Cell::Int(i) => Value::from(*i),
            Cell::Bool(b) => Value::Bool(*b),
            Cell::Text(s) => Value::String(s.clone()),
        }
    }
}

#[derive(Debug)]
enum Item {
    Field(String, Cell),
    List(String, Vec<Cell>),
    Table {
        title: String,
        header: Vec<String>,
        rows: Vec<Vec<Cell>>,
    },
}

#[derive(Debug, Default)]
pub struct Report {
    items: Vec<Item>,
}

impl Report {
    pub fn field(&mut self, key: &str, value: Cell) {
        self.items.push(Item::Field(key.into(), value));
    }

    pub fn text(&mut self, key: &str, value: &str) {
        self.field(key, Cell::Text(value.into()));
    }

    pub fn list(&mut self, key: &str, values: Vec<Cell>) {
        self.items.push(Item::List(key.into(), values));
    }

    pub fn table(&mut self, title: &str, header: Vec<String>, rows: Vec<Vec<Cell>>) {
        self.items.push(Item::Table {
            title: title.into(),
            header,
            rows,
        });
    }

    /// One row per outcome tuple, axis values then probability.
    pub fn distribution(&mut self, title: &str, dist: &JointDistribution) {
        let mut header: Vec<String> = dist.axes().iter().map(|a| a.name.clone()).collect();
        header.push("p".into());
        let rows = dist
            .iter()
            .map(|(t, p)| {
                let mut row = super::axis_cells(dist.axes(), &t);
                row.push(Cell::Num(p));
                row
            })
            .collect();
        self.table(title, header, rows);
    }

    pub fn write(&self, format: Format, out: &mut dyn Write) -> io::Result<()> {
        match format {
            Format::Table => self.write_table(out),
            Format::Json => {
                let text = serde_json::to_string_pretty(&self.to_json()).map_err(io::Error::other)?;
                writeln!(out, "{text}")
            }
        }
    }

    fn write_table(&self, out: &mut dyn Write) -> io::Result<()> {
        for item in &self.items {
            match item {
                Item::Field(k, v) => writeln!(out, "{k}: {}", v.text())?,
                Item::List(k, vs) => {
                    let joined: Vec<String> = vs.iter().map(Cell::text).collect();
                    writeln!(out, "{k}: {}", joined.join(", "))?
                }
                Item::Table { title, header, rows } => {
                    let cells: Vec<Vec<String>> = rows.iter().map(|r| r.iter().map(Cell::text).collect()).collect();
                    let widths: Vec<usize> = (0..header.len())
                        .map(|j| {
                            cells
                                .iter()
                                .map(|r| r[j].len())
                                .chain([header[j].len()])
                                .max()
                                .unwrap_or(0)
                        })
                        .collect();
                    writeln!(out, "[{title}]")?;
                    let line = |row: &[String]| {
                        row.iter()
                            .zip(&widths)
                            .map(|(s, w)| format!("{s:>w$}"))
                            .collect::<Vec<_>>()
                            .join("  ")
                    };
                    writeln!(out, "{}", line(header))?;
                    for r in &cells {
                        writeln!(out, "{}", line(r))?;
                    }
                }
            }
        }
        Ok(())
    }

    pub fn to_json(&self) -> Value {
        let mut map = Map::new();
        for item in &self.items {
            match item {
                Item::Field(k, v) => {
                    map.insert(k.clone(), v.json());
                }
                Item::List(k, vs) => {
                    map.insert(k.clone(), Value::Array(vs.iter().map(Cell::json).collect()));
                }
                Item::Table { title, header, rows } => {
                    let mut table = Map::new();
                    table.insert("columns".into(), header.iter().map(|h| Value::String(h.clone())).collect());
                    let rows = rows.iter().map(|r| Value::Array(r.iter().map(Cell::json).collect())).collect();
                    table.insert("rows".into(), Value::Array(rows));
                    map.insert(title.clone(), Value::Object(table));
                }
            }
        }
        Value::Object(map)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn twelve_significant_digits() {
        assert_eq!(num12(2.0 * std::f64::consts::SQRT_2), "2.82842712475");
        assert_eq!(num12(0.5), "0.5");
        assert_eq!(num12(-0.0), "0");
        assert_eq!(num12(1e-17), "1e-17");
        assert_eq!(signed(1.0), "+1");
        assert_eq!(signed(-1.0), "-1");
    }

    #[test]
    fn table_and_json_agree() {
        let mut r = Report::default();
        r.field("x", Cell::Num(1.0 / 3.0));
        r.table("t", vec!["a".into()], vec![vec![Cell::Num(2.0 / 3.0)]]);
        let mut buf = Vec::new();
        r.write(Format::Table, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.contains("x: 0.333333333333"));
        let json = r.to_json();
        assert_eq!(json["x"].as_f64().unwrap().to_string(), "0.333333333333");
        assert_eq!(json["t"]["rows"][0][0].as_f64().unwrap().to_string(), "0.666666666667");
    }
}
