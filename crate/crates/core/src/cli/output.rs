use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::json;

use crate::error::Result;
use crate::quantum::CMatrix;

/// Collects result files for one run and writes them under `dir`.
pub struct Output {
    dir: PathBuf,
    files: Vec<String>,
}

impl Output {
    pub fn new(dir: &Path) -> Result<Self> {
        fs::create_dir_all(dir)?;
        Ok(Output { dir: dir.to_path_buf(), files: Vec::new() })
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn path(&self, name: &str) -> PathBuf {
        self.dir.join(name)
    }

    pub fn files(&self) -> &[String] {
        &self.files
    }

    fn record(&mut self, name: &str) {
        if !self.files.iter().any(|f| f == name) {
            self.files.push(name.to_string());
        }
    }

    pub fn text(&mut self, name: &str, body: &str) -> Result<()> {
        fs::write(self.path(name), body)?;
        self.record(name);
        Ok(())
    }

    pub fn csv(&mut self, name: &str, header: &[&str], rows: impl IntoIterator<Item = Vec<f64>>) -> Result<()> {
        let mut s = header.join(",");
        s.push('\n');
        for row in rows {
            for (k, v) in row.iter().enumerate() {
                if k > 0 {
                    s.push(',');
                }
                write!(s, "{v}").expect("string write");
            }
            s.push('\n');
        }
        self.text(name, &s)
    }

    pub fn json(&mut self, name: &str, value: &impl Serialize) -> Result<()> {
        let mut body = serde_json::to_string_pretty(value)?;
        body.push('\n');
        self.text(name, &body)
    }

    /// Mark a file written by someone else, e.g. an appended trace.
    pub fn adopt(&mut self, name: &str) {
        self.record(name);
    }
}

/// `{"real": [[..]], "imag": [[..]]}`
pub fn matrix_json(m: &CMatrix) -> serde_json::Value {
    let part = |f: fn(&num_complex::Complex64) -> f64| -> Vec<Vec<f64>> {
        (0..m.nrows()).map(|i| (0..m.ncols()).map(|j| f(&m[(i, j)])).collect()).collect()
    };
    json!({ "real": part(|z| z.re), "imag": part(|z| z.im) })
}

pub fn version_stamp() -> String {
    let rev = std::process::Command::new("git")
        .args(["describe", "--always", "--dirty", "--tags"])
        .current_dir(env!("CARGO_MANIFEST_DIR"))
        .output()
        .ok()
        .filter(|o| o.status.success())
        .map(|o| String::from_utf8_lossy(&o.stdout).trim().to_string())
        .unwrap_or_else(|| "unknown".into());
    format!("{} ({rev})", env!("CARGO_PKG_VERSION"))
}
