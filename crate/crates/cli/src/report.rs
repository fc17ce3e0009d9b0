//! CSV reports.
//!
//! Every report starts with one comment line
//! `# ssag-report v1 config_sha256=<hex> seed=<seed> units=bits/s`,
//! followed by a header row and the data rows.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use sha2::{Digest, Sha256};

use crate::config::ExperimentConfig;

pub const SCHEMA_VERSION: u32 = 1;

/// SHA-256 of the canonical config echo. The output section is left out:
/// where reports go does not change what they contain.
pub fn config_hash(cfg: &ExperimentConfig) -> String {
    let mut c = cfg.clone();
    c.output = Default::default();
    let digest = Sha256::digest(c.echo().as_bytes());
    digest.iter().map(|b| format!("{b:02x}")).collect()
}

/// A table waiting to be written.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(header: &[&str]) -> Self {
        Self {
            header: header.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push<I, S>(&mut self, row: I)
    where
        I: IntoIterator<Item = S>,
        S: ToString,
    {
        let row: Vec<String> = row.into_iter().map(|s| s.to_string()).collect();
        assert_eq!(
            row.len(),
            self.header.len(),
            "row width does not match header"
        );
        self.rows.push(row);
    }

    /// Report text: provenance comment, header, rows.
    pub fn render(&self, hash: &str, seed: u64) -> Result<String> {
        let mut out = format!(
            "# ssag-report v{SCHEMA_VERSION} config_sha256={hash} seed={seed} units=bits/s\n"
        );
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.header)?;
        for r in &self.rows {
            w.write_record(r)?;
        }
        out.push_str(std::str::from_utf8(&w.into_inner()?)?);
        Ok(out)
    }
}

/// Writes `table` as `<dir>/<name>.csv`, creating `dir` if needed.
pub fn write_report(
    table: &Table,
    dir: &Path,
    name: &str,
    hash: &str,
    seed: u64,
) -> Result<PathBuf> {
    fs::create_dir_all(dir).with_context(|| format!("cannot create {}", dir.display()))?;
    let path = dir.join(format!("{name}.csv"));
    fs::write(&path, table.render(hash, seed)?)
        .with_context(|| format!("cannot write {}", path.display()))?;
    Ok(path)
}

/// Fixed-precision float formatting for stable report bytes.
pub fn num(x: f64) -> String {
    if x == 0.0 {
        "0".to_string()
    } else {
        format!("{x:.9e}")
    }
}
