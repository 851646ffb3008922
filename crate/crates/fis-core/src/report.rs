//! Machine-readable run reports: a versioned JSON envelope with
//! deterministic rendering (17 significant digits for every float, sorted
//! object keys) and a sidecar file for wall-clock data so the main report is
//! byte-identical across runs of the same config.

use serde::Serialize;
use serde_json::Value;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use thiserror::Error;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum ReportError {
    #[error("serialization failed: {0}")]
    Serialize(#[from] serde_json::Error),
    #[error("writing {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
}

/// Envelope shared by every subcommand report.
#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub schema_version: u32,
    pub tool_version: String,
    pub command: String,
    /// Echo of the resolved configuration, seeds included.
    pub inputs: Value,
    pub results: Value,
}

impl Report {
    pub fn new(command: &str, inputs: Value, results: Value) -> Self {
        Report {
            schema_version: SCHEMA_VERSION,
            tool_version: crate::VERSION.to_string(),
            command: command.to_string(),
            inputs,
            results,
        }
    }

    /// Deterministic JSON text: sorted keys, floats at 17 significant
    /// digits, trailing newline.
    pub fn render(&self) -> Result<String, ReportError> {
        let value = serde_json::to_value(self)?;
        let mut out = String::new();
        render_value(&value, 0, &mut out);
        out.push('\n');
        Ok(out)
    }

    /// Writes the report to `path` and timing data to `path` with a
    /// `.meta.json` suffix appended.
    pub fn write(&self, path: &Path, wall_clock_seconds: f64) -> Result<(), ReportError> {
        let text = self.render()?;
        fs::write(path, text).map_err(|source| ReportError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        let sidecar = sidecar_path(path);
        let meta = format!(
            "{{\n  \"wall_clock_seconds\": {}\n}}\n",
            format_float(wall_clock_seconds)
        );
        fs::write(&sidecar, meta).map_err(|source| ReportError::Io {
            path: sidecar,
            source,
        })
    }
}

pub fn sidecar_path(path: &Path) -> PathBuf {
    let mut name = path.file_name().unwrap_or_default().to_os_string();
    name.push(".meta.json");
    path.with_file_name(name)
}

/// 17 significant digits, scientific notation; round-trips every finite f64.
pub fn format_float(x: f64) -> String {
    if x.is_nan() {
        return "null".to_string();
    }
    if x.is_infinite() {
        return if x > 0.0 { "1e400" } else { "-1e400" }.to_string();
    }
    format!("{:.16e}", x)
}

fn render_value(value: &Value, indent: usize, out: &mut String) {
    match value {
        Value::Null => out.push_str("null"),
        Value::Bool(b) => {
            let _ = write!(out, "{b}");
        }
        Value::Number(n) => {
            if let Some(f) = n.as_f64().filter(|_| !n.is_i64() && !n.is_u64()) {
                out.push_str(&format_float(f));
            } else {
                let _ = write!(out, "{n}");
            }
        }
        Value::String(s) => {
            let _ = write!(out, "{}", Value::String(s.clone()));
        }
        Value::Array(items) => {
            if items.is_empty() {
                out.push_str("[]");
                return;
            }
            out.push('[');
            for (i, item) in items.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                newline(out, indent + 1);
                render_value(item, indent + 1, out);
            }
            newline(out, indent);
            out.push(']');
        }
        Value::Object(map) => {
            if map.is_empty() {
                out.push_str("{}");
                return;
            }
            out.push('{');
            // serde_json without preserve_order keeps keys sorted already;
            // sort defensively so determinism never depends on features.
            let mut keys: Vec<&String> = map.keys().collect();
            keys.sort();
            for (i, key) in keys.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                newline(out, indent + 1);
                let _ = write!(out, "{}: ", Value::String((*key).clone()));
                render_value(&map[*key], indent + 1, out);
            }
            newline(out, indent);
            out.push('}');
        }
    }
}

fn newline(out: &mut String, indent: usize) {
    out.push('\n');
    for _ in 0..indent {
        out.push_str("  ");
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn floats_render_with_full_precision() {
        let cases = [
            std::f64::consts::PI,
            2.7381404928570854,
            0.1,
            -1.0 / 3.0,
            1e-300,
            0.0,
        ];
        for &x in &cases {
            let text = format_float(x);
            let back: f64 = text.parse().unwrap();
            assert_eq!(back, x, "{text} did not round-trip");
        }
        assert_eq!(format_float(0.5), "5.0000000000000000e-1");
    }

    #[test]
    fn render_is_deterministic_and_sorted() {
        let report = Report::new(
            "dimension",
            json!({"seed": 7, "s": 0.75}),
            json!({"t0": 2.7381404928570854, "branch": "mixed", "list": [1, 0.5]}),
        );
        let a = report.render().unwrap();
        let b = report.render().unwrap();
        assert_eq!(a, b);
        // Keys appear in sorted order.
        let branch = a.find("\"branch\"").unwrap();
        let list = a.find("\"list\"").unwrap();
        let t0 = a.find("\"t0\"").unwrap();
        assert!(branch < list && list < t0);
        // Integers stay plain, floats go scientific.
        assert!(a.contains("\"seed\": 7"));
        assert!(a.contains("2.7381404928570854e0"));
        // Valid JSON.
        let parsed: Value = serde_json::from_str(&a).unwrap();
        assert_eq!(parsed["schema_version"], json!(SCHEMA_VERSION));
    }

    #[test]
    fn write_emits_report_and_sidecar() {
        let dir = std::env::temp_dir().join("fis-report-test");
        fs::create_dir_all(&dir).unwrap();
        let path = dir.join("out.json");
        let report = Report::new("markov", json!({}), json!({"order": 12}));
        report.write(&path, 1.25).unwrap();
        let body = fs::read_to_string(&path).unwrap();
        assert!(body.contains("\"order\": 12"));
        assert!(!body.contains("wall_clock"));
        let meta = fs::read_to_string(sidecar_path(&path)).unwrap();
        assert!(meta.contains("1.2500000000000000e0"));
        fs::remove_dir_all(&dir).unwrap();
    }
}
