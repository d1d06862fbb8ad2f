//! CSV tables and the run manifest.
//!
//! Numbers are written with 17 significant digits in scientific notation so
//! that every value round-trips exactly and repeated runs are byte-identical.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::Duration;

use crate::error::{CliError, CliResult};

pub fn fmt_real(x: f64) -> String {
    format!("{x:.16e}")
}

/// Blank cell for `None`.
pub fn fmt_opt(x: Option<f64>) -> String {
    x.map(fmt_real).unwrap_or_default()
}

pub fn fmt_flag(b: bool) -> String {
    if b { "1" } else { "0" }.to_string()
}

/// In-memory table, written in one go once every row is known.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub name: String,
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(name: impl Into<String>, header: &[&str]) -> Self {
        Table {
            name: name.into(),
            header: header.iter().map(|h| h.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn write(&self, dir: &Path) -> CliResult<PathBuf> {
        let path = dir.join(&self.name);
        let tmp = dir.join(format!(".{}.tmp", self.name));
        let csv_err = |source| CliError::Csv {
            path: path.clone(),
            source,
        };
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_path(&tmp)
            .map_err(csv_err)?;
        w.write_record(&self.header).map_err(csv_err)?;
        for row in &self.rows {
            w.write_record(row).map_err(csv_err)?;
        }
        w.flush().map_err(|source| CliError::Io {
            path: path.clone(),
            source,
        })?;
        drop(w);
        rename(&tmp, &path)?;
        Ok(path)
    }
}

fn rename(from: &Path, to: &Path) -> CliResult<()> {
    fs::rename(from, to).map_err(|source| CliError::Io {
        path: to.to_path_buf(),
        source,
    })
}

pub fn ensure_dir(dir: &Path) -> CliResult<()> {
    fs::create_dir_all(dir).map_err(|source| CliError::Io {
        path: dir.to_path_buf(),
        source,
    })
}

/// Flat `key=value` record of a run.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Manifest {
    entries: Vec<(String, String)>,
}

pub const MANIFEST_NAME: &str = "manifest.txt";

impl Manifest {
    pub fn new(command: &str) -> Self {
        let mut m = Manifest::default();
        m.set("tool", env!("CARGO_PKG_NAME"));
        m.set("version", env!("CARGO_PKG_VERSION"));
        m.set("command", command);
        m.set("parallel", gcs_core::Exec::Parallel.is_parallel());
        m
    }

    pub fn set(&mut self, key: &str, value: impl ToString) {
        self.entries.push((key.to_string(), value.to_string()));
    }

    pub fn set_real(&mut self, key: &str, value: f64) {
        self.set(key, fmt_real(value));
    }

    pub fn set_list(&mut self, key: &str, values: &[f64]) {
        let joined: Vec<String> = values.iter().map(|v| fmt_real(*v)).collect();
        self.set(key, joined.join(";"));
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries
            .iter()
            .find(|(k, _)| k == key)
            .map(|(_, v)| v.as_str())
    }

    pub fn entries(&self) -> &[(String, String)] {
        &self.entries
    }

    pub fn render(&self) -> String {
        self.entries
            .iter()
            .map(|(k, v)| format!("{k}={v}\n"))
            .collect()
    }

    /// Writes through a temporary file and a rename.
    pub fn write(&mut self, dir: &Path, elapsed: Duration) -> CliResult<PathBuf> {
        self.set("duration_seconds", format!("{:.3}", elapsed.as_secs_f64()));
        let path = dir.join(MANIFEST_NAME);
        let tmp = dir.join(format!(".{MANIFEST_NAME}.tmp"));
        fs::write(&tmp, self.render()).map_err(|source| CliError::Io {
            path: path.clone(),
            source,
        })?;
        rename(&tmp, &path)?;
        Ok(path)
    }
}
