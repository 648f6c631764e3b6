//! Staged output: files are collected in memory and written together with
//! a manifest once the command has succeeded. A failed write removes
//! whatever was already written.

use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use serde::Serialize;
use serde_json::Value;

use crate::args::Format;
use crate::inputs::InputDigest;

pub struct Outputs {
    format: Format,
    files: Vec<(String, Vec<u8>)>,
}

#[derive(Serialize)]
struct Manifest<'a> {
    tool: &'static str,
    version: &'static str,
    command: &'a str,
    config: &'a Value,
    inputs: &'a [InputDigest],
    outputs: Vec<&'a str>,
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

fn json_cell(s: &str) -> Value {
    if let Ok(i) = s.parse::<i64>() {
        return Value::from(i);
    }
    match s.parse::<f64>() {
        Ok(f) if f.is_finite() && !s.is_empty() => Value::from(f),
        _ if s == "true" || s == "false" => Value::Bool(s == "true"),
        _ => Value::from(s),
    }
}

impl Outputs {
    pub fn new(format: Format) -> Self {
        Outputs {
            format,
            files: Vec::new(),
        }
    }

    /// Adds a table as `name.csv` or `name.json` depending on the format.
    pub fn table(&mut self, name: &str, header: &[&str], rows: &[Vec<String>]) {
        match self.format {
            Format::Csv => {
                let mut text = header.join(",");
                text.push('\n');
                for r in rows {
                    let line: Vec<String> = r.iter().map(|c| csv_field(c)).collect();
                    text.push_str(&line.join(","));
                    text.push('\n');
                }
                self.files.push((format!("{name}.csv"), text.into_bytes()));
            }
            Format::Json => {
                let records: Vec<Value> = rows
                    .iter()
                    .map(|r| Value::Object(header.iter().zip(r).map(|(h, c)| (h.to_string(), json_cell(c))).collect()))
                    .collect();
                let mut text = serde_json::to_string_pretty(&records).expect("json");
                text.push('\n');
                self.files.push((format!("{name}.json"), text.into_bytes()));
            }
        }
    }

    pub fn json<T: Serialize>(&mut self, name: &str, value: &T) -> Result<()> {
        let mut text = serde_json::to_string_pretty(value)?;
        text.push('\n');
        self.files.push((format!("{name}.json"), text.into_bytes()));
        Ok(())
    }

    pub fn raw(&mut self, name: &str, bytes: Vec<u8>) {
        self.files.push((name.to_string(), bytes));
    }

    /// Writes every staged file plus `manifest.json` into `dir`.
    pub fn commit(self, dir: &Path, command: &str, config: &Value, inputs: &[InputDigest]) -> Result<Vec<PathBuf>> {
        let manifest = Manifest {
            tool: "lobimpact",
            version: env!("CARGO_PKG_VERSION"),
            command,
            config,
            inputs,
            outputs: self.files.iter().map(|(n, _)| n.as_str()).collect(),
        };
        let mut text = serde_json::to_string_pretty(&manifest)?;
        text.push('\n');

        let created_dir = !dir.exists();
        let mut written = Vec::new();
        let result = (|| -> Result<()> {
            std::fs::create_dir_all(dir).with_context(|| format!("cannot create {}", dir.display()))?;
            let manifest_file = ("manifest.json".to_string(), text.into_bytes());
            for (name, bytes) in self.files.iter().chain(std::iter::once(&manifest_file)) {
                let path = dir.join(name);
                written.push(path.clone());
                std::fs::write(&path, bytes).with_context(|| format!("cannot write {}", path.display()))?;
            }
            Ok(())
        })();
        if let Err(e) = result {
            for p in &written {
                let _ = std::fs::remove_file(p);
            }
            if created_dir {
                let _ = std::fs::remove_dir(dir);
            }
            return Err(e);
        }
        Ok(written)
    }
}

/// Shortest round-trip formatting for floats; empty for undefined values.
pub fn num(x: f64) -> String {
    if x.is_nan() {
        String::new()
    } else {
        format!("{x}")
    }
}

pub fn opt(x: Option<f64>) -> String {
    x.map(num).unwrap_or_default()
}
