//! Deterministic plain-text emitters: comma-separated tables with a fixed
//! header row, and flat key=value summaries. Numbers are written in Rust's
//! shortest round-trip form, so identical inputs produce identical bytes.

use std::fmt::Display;
use std::fs;
use std::io;
use std::path::Path;

/// Quotes a cell when it contains a comma, a quote, or a line break;
/// otherwise passes it through unchanged.
pub fn escape_cell(text: &str) -> String {
    if text.contains([',', '"', '\n', '\r']) {
        format!("\"{}\"", text.replace('"', "\"\""))
    } else {
        text.to_string()
    }
}

/// One comma-separated table with a mandatory header.
#[derive(Debug, Clone)]
pub struct Table {
    columns: Vec<String>,
    rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(columns: &[&str]) -> Self {
        Table {
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    /// Appends one row; the cell count must match the header.
    pub fn row(&mut self, cells: Vec<String>) {
        assert_eq!(
            cells.len(),
            self.columns.len(),
            "row width must match the header"
        );
        self.rows.push(cells);
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        out.push_str(
            &self
                .columns
                .iter()
                .map(|c| escape_cell(c))
                .collect::<Vec<_>>()
                .join(","),
        );
        out.push('\n');
        for row in &self.rows {
            out.push_str(
                &row.iter()
                    .map(|c| escape_cell(c))
                    .collect::<Vec<_>>()
                    .join(","),
            );
            out.push('\n');
        }
        out
    }

    pub fn write(&self, path: &Path) -> io::Result<()> {
        fs::write(path, self.render())
    }
}

/// Flat key=value report, emitted in insertion order.
#[derive(Debug, Clone, Default)]
pub struct KvReport {
    pairs: Vec<(String, String)>,
}

impl KvReport {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, key: impl Into<String>, value: impl Display) {
        let key = key.into();
        let text = value.to_string();
        assert!(
            !key.contains(['=', '\n']) && !text.contains('\n'),
            "keys and values must be single-line and '='-free"
        );
        self.pairs.push((key, text));
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        for (k, v) in &self.pairs {
            out.push_str(k);
            out.push('=');
            out.push_str(v);
            out.push('\n');
        }
        out
    }

    pub fn write(&self, path: &Path) -> io::Result<()> {
        fs::write(path, self.render())
    }
}

/// Shortest round-trip decimal form of a float (Rust's `Display`).
pub fn num(x: f64) -> String {
    format!("{x}")
}
