//! Tabular output with a provenance header, rendered as CSV or JSON.
//!
//! Computed floats are always written as `{:.12e}`; a sensitivity with zero
//! slope is written as `no-information`. The echoed configuration is JSON with
//! shortest round-trip floats, so feeding it back through `--config`
//! reproduces the output byte for byte.

use std::fmt::Write as _;

use clap::ValueEnum;
use nonlinear_metrology::Precision;
use serde::{Deserialize, Serialize};
use serde_json::Value;

pub const NO_INFORMATION: &str = "no-information";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Real(f64),
    Int(i64),
    Bool(bool),
    Text(String),
    NoInformation,
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::Real(v) => format!("{v:.12e}"),
            Cell::Int(v) => v.to_string(),
            Cell::Bool(b) => b.to_string(),
            Cell::Text(s) if s.contains([',', '"', '\n']) => {
                format!("\"{}\"", s.replace('"', "\"\""))
            }
            Cell::Text(s) => s.clone(),
            Cell::NoInformation => NO_INFORMATION.into(),
        }
    }

    fn json(&self) -> String {
        match self {
            Cell::Real(v) if v.is_finite() => format!("{v:.12e}"),
            Cell::Real(v) => format!("\"{v}\""),
            Cell::Int(v) => v.to_string(),
            Cell::Bool(b) => b.to_string(),
            Cell::Text(s) => Value::String(s.clone()).to_string(),
            Cell::NoInformation => format!("\"{NO_INFORMATION}\""),
        }
    }
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Real(v)
    }
}

impl From<u64> for Cell {
    fn from(v: u64) -> Self {
        Cell::Int(v as i64)
    }
}

impl From<u32> for Cell {
    fn from(v: u32) -> Self {
        Cell::Int(v as i64)
    }
}

impl From<i64> for Cell {
    fn from(v: i64) -> Self {
        Cell::Int(v)
    }
}

impl From<bool> for Cell {
    fn from(v: bool) -> Self {
        Cell::Bool(v)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.into())
    }
}

impl From<String> for Cell {
    fn from(v: String) -> Self {
        Cell::Text(v)
    }
}

impl From<Precision> for Cell {
    fn from(p: Precision) -> Self {
        p.value().map_or(Cell::NoInformation, Cell::Real)
    }
}

impl<T: Into<Cell>> From<Option<T>> for Cell {
    fn from(v: Option<T>) -> Self {
        v.map_or(Cell::NoInformation, Into::into)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub command: &'static str,
    pub config: Value,
    pub warnings: Vec<String>,
    pub summary: Vec<(&'static str, Cell)>,
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
}

impl Report {
    pub fn new(command: &'static str, config: Value, columns: Vec<&'static str>) -> Self {
        Report {
            command,
            config,
            warnings: Vec::new(),
            summary: Vec::new(),
            columns,
            rows: Vec::new(),
        }
    }

    pub fn summary(&mut self, key: &'static str, value: impl Into<Cell>) {
        self.summary.push((key, value.into()));
    }

    pub fn row(&mut self, cells: Vec<Cell>) {
        debug_assert_eq!(cells.len(), self.columns.len());
        self.rows.push(cells);
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Csv => self.csv(),
            Format::Json => self.json(),
        }
    }

    fn csv(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(
            out,
            "# nlmetro {} {}",
            env!("CARGO_PKG_VERSION"),
            self.command
        );
        let _ = writeln!(out, "# config: {}", self.config);
        for w in &self.warnings {
            let _ = writeln!(out, "# warning: {w}");
        }
        for (key, value) in &self.summary {
            let _ = writeln!(out, "# {key}: {}", value.csv());
        }
        if !self.columns.is_empty() {
            let _ = writeln!(out, "{}", self.columns.join(","));
        }
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(Cell::csv).collect();
            let _ = writeln!(out, "{}", cells.join(","));
        }
        out
    }

    fn json(&self) -> String {
        let quote = |s: &str| Value::String(s.into()).to_string();
        let mut out = String::from("{\n");
        let _ = writeln!(out, "  \"tool\": \"nlmetro\",");
        let _ = writeln!(out, "  \"version\": {},", quote(env!("CARGO_PKG_VERSION")));
        let _ = writeln!(out, "  \"command\": {},", quote(self.command));
        let _ = writeln!(out, "  \"config\": {},", self.config);
        let warnings: Vec<String> = self.warnings.iter().map(|w| quote(w)).collect();
        let _ = writeln!(out, "  \"warnings\": [{}],", warnings.join(", "));
        let summary: Vec<String> = self
            .summary
            .iter()
            .map(|(k, v)| format!("{}: {}", quote(k), v.json()))
            .collect();
        let _ = writeln!(out, "  \"summary\": {{{}}},", summary.join(", "));
        let columns: Vec<String> = self.columns.iter().map(|c| quote(c)).collect();
        let _ = writeln!(out, "  \"columns\": [{}],", columns.join(", "));
        out.push_str("  \"rows\": [");
        for (i, row) in self.rows.iter().enumerate() {
            let cells: Vec<String> = row.iter().map(Cell::json).collect();
            let sep = if i + 1 == self.rows.len() { "" } else { "," };
            let _ = write!(out, "\n    [{}]{sep}", cells.join(", "));
        }
        out.push_str(if self.rows.is_empty() {
            "]\n}\n"
        } else {
            "\n  ]\n}\n"
        });
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> Report {
        let mut r = Report::new(
            "demo",
            serde_json::json!({"J": 200.0}),
            vec!["phi", "delta_phi"],
        );
        r.warnings.push("careful, \"quoted\"".into());
        r.summary("seed", 7u64);
        r.row(vec![0.0.into(), Precision::Finite(2.5e-4).into()]);
        r.row(vec![1.0.into(), Precision::NoInformation.into()]);
        r
    }

    #[test]
    fn csv_layout() {
        let text = sample().render(Format::Csv);
        let lines: Vec<&str> = text.lines().collect();
        assert!(lines[0].starts_with("# nlmetro "));
        assert_eq!(lines[1], "# config: {\"J\":200.0}");
        assert_eq!(lines[4], "phi,delta_phi");
        assert_eq!(lines[5], "0.000000000000e0,2.500000000000e-4");
        assert_eq!(lines[6], "1.000000000000e0,no-information");
    }

    #[test]
    fn json_is_valid() {
        let v: Value = serde_json::from_str(&sample().render(Format::Json)).unwrap();
        assert_eq!(v["rows"][1][1], "no-information");
        assert_eq!(v["summary"]["seed"], 7);
        assert_eq!(v["warnings"][0], "careful, \"quoted\"");
        let empty = Report::new("demo", Value::Null, vec![]);
        let _: Value = serde_json::from_str(&empty.render(Format::Json)).unwrap();
    }
}
