//! Byte-deterministic CSV emission.
//!
//! Numbers are written with 15 significant digits in scientific notation,
//! `-0` is folded into `0`, lines end in `\n`, and a missing sample is an
//! empty cell. The header block is `#`-prefixed.

use std::fmt::Write as _;

/// One output file: header comments, column names and rows.
#[derive(Debug, Clone, PartialEq)]
pub struct CsvTable {
    pub file_name: String,
    pub header: Vec<String>,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Option<f64>>>,
}

impl CsvTable {
    pub fn new(file_name: impl Into<String>, columns: Vec<String>) -> Self {
        Self {
            file_name: file_name.into(),
            header: Vec::new(),
            columns,
            rows: Vec::new(),
        }
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        for line in &self.header {
            out.push_str("# ");
            out.push_str(line);
            out.push('\n');
        }
        out.push_str(&self.columns.iter().map(|c| quote(c)).collect::<Vec<_>>().join(","));
        out.push('\n');
        for row in &self.rows {
            for (i, cell) in row.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                if let Some(v) = cell {
                    out.push_str(&format_value(*v));
                }
            }
            out.push('\n');
        }
        out
    }

    /// Number of data series, excluding the abscissa column.
    pub fn series_count(&self) -> usize {
        self.columns.len().saturating_sub(1)
    }
}

/// `{:.14e}` with the sign of zero dropped.
pub fn format_value(v: f64) -> String {
    let v = if v == 0.0 { 0.0 } else { v };
    let mut s = String::with_capacity(24);
    write!(s, "{v:.14e}").expect("writing to a String cannot fail");
    s
}

fn quote(name: &str) -> String {
    if name.contains([',', '"', '\n']) {
        format!("\"{}\"", name.replace('"', "\"\""))
    } else {
        name.to_string()
    }
}

/// Parse the data rows of a rendered table, skipping header and column lines.
pub fn parse_rows(text: &str) -> Vec<Vec<Option<f64>>> {
    text.lines()
        .filter(|l| !l.starts_with('#'))
        .skip(1)
        .map(|l| l.split(',').map(|c| c.parse::<f64>().ok()).collect())
        .collect()
}
