//! Table, CSV and JSON rendering.

use clap::ValueEnum;
use serde_json::{Map, Value};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
    Table,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, ValueEnum)]
pub enum Separator {
    #[default]
    Comma,
    Space,
}

impl Separator {
    pub fn as_str(self) -> &'static str {
        match self {
            Separator::Comma => ",",
            Separator::Space => " ",
        }
    }
}

/// Placeholder for an empty cell in space-separated output, where an empty
/// string would shift the columns.
pub const MISSING_CELL: &str = "-";

/// Shortest representation that parses back to the same `f64`; exponent
/// form outside `[1e-5, 1e16)`.
pub fn num(x: f64) -> String {
    let a = x.abs();
    if a == 0.0 || (1e-5..1e16).contains(&a) {
        format!("{x}")
    } else {
        format!("{x:e}")
    }
}

#[derive(Clone, Debug, Default)]
pub struct Table {
    pub meta: Vec<String>,
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(header: &[&str]) -> Self {
        Self { header: header.iter().map(|h| h.to_string()).collect(), ..Default::default() }
    }

    pub fn meta(mut self, line: impl Into<String>) -> Self {
        self.meta.push(line.into());
        self
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    /// gnuplot-style: `#` metadata lines, a `#` header, then data rows.
    pub fn csv(&self, sep: Separator) -> String {
        let mut out = String::new();
        for m in &self.meta {
            out.push_str(&format!("# {m}\n"));
        }
        out.push_str(&format!("# {}\n", self.header.join(sep.as_str())));
        for row in &self.rows {
            let cells: Vec<&str> = row
                .iter()
                .map(|c| if c.is_empty() && sep == Separator::Space { MISSING_CELL } else { c.as_str() })
                .collect();
            out.push_str(&cells.join(sep.as_str()));
            out.push('\n');
        }
        out
    }

    pub fn pretty(&self) -> String {
        let mut widths: Vec<usize> = self.header.iter().map(|h| h.chars().count()).collect();
        for row in &self.rows {
            for (w, c) in widths.iter_mut().zip(row) {
                *w = (*w).max(c.chars().count());
            }
        }
        let line = |cells: &[String]| {
            let padded: Vec<String> = cells.iter().zip(&widths).map(|(c, w)| format!("{c:<w$}")).collect();
            padded.join("  ").trim_end().to_string() + "\n"
        };
        let mut out = String::new();
        for m in &self.meta {
            out.push_str(m);
            out.push('\n');
        }
        out.push_str(&line(&self.header));
        for row in &self.rows {
            out.push_str(&line(row));
        }
        out
    }
}

/// Versioned JSON document: `{"schema": 1, "command": ..., ...body}`.
pub fn json_document(command: &str, body: Value) -> String {
    let mut doc = Map::new();
    doc.insert("schema".into(), Value::from(1));
    doc.insert("command".into(), Value::from(command));
    if let Value::Object(fields) = body {
        doc.extend(fields);
    }
    let mut text = serde_json::to_string_pretty(&Value::Object(doc)).expect("JSON values serialize");
    text.push('\n');
    text
}

/// Parses CSV produced by [`Table::csv`] back into header and rows.
pub fn parse_csv(text: &str, sep: Separator) -> (Vec<String>, Vec<Vec<String>>) {
    let split = |l: &str| -> Vec<String> {
        match sep {
            Separator::Comma => l.split(',').map(str::to_string).collect(),
            Separator::Space => l
                .split(' ')
                .map(|c| if c == MISSING_CELL { String::new() } else { c.to_string() })
                .collect(),
        }
    };
    let comments: Vec<&str> = text.lines().filter(|l| l.starts_with('#')).collect();
    let header = comments.last().map(|h| split(h.trim_start_matches('#').trim_start())).unwrap_or_default();
    let rows = text.lines().filter(|l| !l.starts_with('#') && !l.is_empty()).map(split).collect();
    (header, rows)
}
