//! Golden files: the default-config output of every figure plus a SHA-256
//! manifest, and the byte-level comparison against a fresh run.

use super::config::{FigureName, RunConfig};
use super::csv::CsvTable;
use super::figures::generate_figure;
use crate::error::{Error, Result};
use sha2::{Digest, Sha256};
use std::path::Path;

pub const MANIFEST: &str = "SHA256SUMS";

/// Default golden directory of this crate.
pub fn default_golden_dir() -> &'static Path {
    Path::new(concat!(env!("CARGO_MANIFEST_DIR"), "/tests/golden"))
}

/// Every default figure table, in figure order.
pub fn default_tables() -> Result<Vec<CsvTable>> {
    let mut out = Vec::new();
    for name in FigureName::ALL {
        out.extend(generate_figure(name, &RunConfig::for_figure(name))?);
    }
    Ok(out)
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

fn manifest_text(files: &[(String, String)]) -> String {
    files
        .iter()
        .map(|(name, body)| format!("{}  {name}\n", sha256_hex(body.as_bytes())))
        .collect()
}

/// Regenerate the golden directory.
pub fn write_golden(dir: &Path) -> Result<Vec<String>> {
    let files: Vec<(String, String)> = default_tables()?
        .into_iter()
        .map(|t| (t.file_name.clone(), t.render()))
        .collect();
    std::fs::create_dir_all(dir).map_err(|e| Error::Config(format!("cannot create {}: {e}", dir.display())))?;
    for (name, body) in &files {
        let path = dir.join(name);
        std::fs::write(&path, body).map_err(|e| Error::Config(format!("cannot write {}: {e}", path.display())))?;
    }
    let path = dir.join(MANIFEST);
    std::fs::write(&path, manifest_text(&files))
        .map_err(|e| Error::Config(format!("cannot write {}: {e}", path.display())))?;
    Ok(files.into_iter().map(|(n, _)| n).collect())
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct GoldenReport {
    pub checked: usize,
    /// `(file, reason)` for every file that differs.
    pub mismatches: Vec<(String, String)>,
}

impl GoldenReport {
    pub fn passed(&self) -> bool {
        self.checked > 0 && self.mismatches.is_empty()
    }
}

/// Compare a fresh default run with `dir`, byte for byte, and check that
/// the committed files still match their manifest.
pub fn check_golden(dir: &Path) -> Result<GoldenReport> {
    let mut report = GoldenReport::default();
    let manifest = std::fs::read_to_string(dir.join(MANIFEST)).unwrap_or_default();
    for table in default_tables()? {
        let name = table.file_name.clone();
        let fresh = table.render();
        report.checked += 1;
        let committed = match std::fs::read_to_string(dir.join(&name)) {
            Ok(s) => s,
            Err(e) => {
                report.mismatches.push((name, format!("cannot read: {e}")));
                continue;
            }
        };
        if !manifest
            .lines()
            .any(|l| l == format!("{}  {name}", sha256_hex(committed.as_bytes())))
        {
            report
                .mismatches
                .push((name.clone(), format!("not listed with its hash in {MANIFEST}")));
        }
        if committed != fresh {
            let line = committed
                .lines()
                .zip(fresh.lines())
                .position(|(a, b)| a != b)
                .map_or_else(|| committed.lines().count().min(fresh.lines().count()) + 1, |i| i + 1);
            report
                .mismatches
                .push((name, format!("first difference on line {line}")));
        }
    }
    Ok(report)
}
