//! Rendering of command results as JSON, CSV or plain text.

use std::fmt::Write as _;

use clap::ValueEnum;
use serde::Serialize;
use serde_json::Value;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Text,
}

/// Run parameters attached to every document.
#[derive(Debug, Clone, Serialize)]
pub struct Provenance {
    pub resolution: usize,
    pub seed: u64,
    pub samples: usize,
    pub tol: f64,
}

#[derive(Debug, Serialize)]
pub struct Document<T: Serialize> {
    pub schema: u32,
    pub command: &'static str,
    pub provenance: Provenance,
    pub passed: bool,
    pub result: T,
}

fn scalar(v: &Value) -> String {
    match v {
        Value::Null => String::new(),
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

/// Dotted-path leaves of a JSON tree, in document order.
fn flatten(prefix: &str, v: &Value, out: &mut Vec<(String, String)>) {
    let join = |k: &str| if prefix.is_empty() { k.to_string() } else { format!("{prefix}.{k}") };
    match v {
        Value::Object(map) => {
            for (k, child) in map {
                flatten(&join(k), child, out);
            }
        }
        Value::Array(items) => {
            for (i, child) in items.iter().enumerate() {
                flatten(&join(&i.to_string()), child, out);
            }
        }
        leaf => out.push((prefix.to_string(), scalar(leaf))),
    }
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

pub fn render<T: Serialize>(doc: &Document<T>, format: Format) -> anyhow::Result<String> {
    let value = serde_json::to_value(doc)?;
    Ok(match format {
        Format::Json => serde_json::to_string_pretty(&value)? + "\n",
        Format::Csv | Format::Text => {
            let mut leaves = Vec::new();
            flatten("", &value, &mut leaves);
            let mut out = String::new();
            if format == Format::Csv {
                out.push_str("key,value\n");
                for (k, v) in leaves {
                    let _ = writeln!(out, "{},{}", csv_field(&k), csv_field(&v));
                }
            } else {
                let width = leaves.iter().map(|(k, _)| k.len()).max().unwrap_or(0);
                for (k, v) in leaves {
                    let _ = writeln!(out, "{k:<width$}  {v}");
                }
            }
            out
        }
    })
}

/// A table of rows rendered with a header line (CSV) or aligned columns (text).
pub fn render_table(header: &[&str], rows: &[Vec<f64>], format: Format) -> String {
    let mut out = String::new();
    match format {
        Format::Csv => {
            out.push_str(&header.join(","));
            out.push('\n');
            for row in rows {
                let cells: Vec<String> = row.iter().map(|x| format!("{x:?}")).collect();
                out.push_str(&cells.join(","));
                out.push('\n');
            }
        }
        _ => {
            for h in header {
                let _ = write!(out, "{h:>24}");
            }
            out.push('\n');
            for row in rows {
                for x in row {
                    let _ = write!(out, "{x:>24.15e}");
                }
                out.push('\n');
            }
        }
    }
    out
}
