//! CSV tables with a schema comment line and fixed number formatting.

use serde::Serialize;
use std::fmt::Display;

pub const SCHEMA_VERSION: u32 = 1;

/// 12 significant digits; `0`, `inf`, `-inf` and `nan` are spelled out.
pub fn fmt_f64(x: f64) -> String {
    if x == 0.0 {
        "0".into()
    } else if x.is_nan() {
        "nan".into()
    } else if x.is_infinite() {
        if x > 0.0 { "inf" } else { "-inf" }.into()
    } else {
        format!("{x:.11e}")
    }
}

pub fn fmt_opt_f64(x: Option<f64>) -> String {
    x.map(fmt_f64).unwrap_or_default()
}

pub fn fmt_opt<T: Display>(x: Option<T>) -> String {
    x.map(|v| v.to_string()).unwrap_or_default()
}

#[derive(Clone, Debug, PartialEq)]
pub struct Table {
    pub name: String,
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
    pub violations: usize,
}

impl Table {
    pub fn new(name: &str, header: &[&str]) -> Self {
        Table { name: name.into(), header: header.iter().map(|h| h.to_string()).collect(), rows: Vec::new(), violations: 0 }
    }

    /// Appends a row; a row with `ok == false` counts as a violation.
    pub fn push(&mut self, row: Vec<String>, ok: bool) {
        assert_eq!(row.len(), self.header.len(), "row width for {}", self.name);
        self.rows.push(row);
        if !ok {
            self.violations += 1;
        }
    }

    pub fn append(&mut self, other: Table) {
        assert_eq!(self.header, other.header, "merging {} tables", self.name);
        self.rows.extend(other.rows);
        self.violations += other.violations;
    }

    pub fn file_name(&self) -> String {
        format!("{}.csv", self.name)
    }

    pub fn to_csv(&self) -> Result<Vec<u8>, csv::Error> {
        let mut out = format!("# schema: wbar/{} v{SCHEMA_VERSION}\n", self.name).into_bytes();
        {
            let mut w = csv::Writer::from_writer(&mut out);
            w.write_record(&self.header)?;
            for row in &self.rows {
                w.write_record(row)?;
            }
            w.flush()?;
        }
        Ok(out)
    }
}

/// One entry of `summary.json`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SuiteSummary {
    pub suite: String,
    pub trials: usize,
    pub violations: usize,
    pub wall_time_ms: u128,
}
