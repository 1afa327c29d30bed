//! Run reports: per-check outcomes plus a digest manifest of every file
//! written. Serialization is deterministic (fixed field order, vectors
//! only), so identical runs produce byte-identical reports.

use crate::config::ScenarioConfig;
use serde::{Deserialize, Serialize};
use std::path::Path;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub command: String,
    pub seed: u64,
    pub tolerance_scale: f64,
    pub scenario: ScenarioConfig,
    pub checks: Vec<CheckRecord>,
    pub manifest: Vec<ManifestEntry>,
    /// True iff no executed check failed (skipped checks do not fail).
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckRecord {
    pub name: String,
    pub outcome: Outcome,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub defect: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tolerance: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
    /// Library operations this check exercised (coverage bookkeeping).
    pub ops: Vec<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Outcome {
    Pass,
    Fail,
    Skip,
}

impl CheckRecord {
    pub fn line(&self) -> String {
        match self.outcome {
            Outcome::Pass => format!(
                "PASS  {:<28} defect {:>12.5e}  tol {:.1e}",
                self.name,
                self.defect.unwrap_or(0.0),
                self.tolerance.unwrap_or(f64::NAN)
            ),
            Outcome::Fail => format!(
                "FAIL  {:<28} defect {:>12.5e}  tol {:.1e}{}",
                self.name,
                self.defect.unwrap_or(f64::NAN),
                self.tolerance.unwrap_or(f64::NAN),
                self.note
                    .as_deref()
                    .map(|n| format!("  ({n})"))
                    .unwrap_or_default()
            ),
            Outcome::Skip => format!(
                "SKIP  {:<28} {}",
                self.name,
                self.note.as_deref().unwrap_or("precondition not met")
            ),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ManifestEntry {
    pub file: String,
    pub bytes: u64,
    pub fnv1a64: String,
}

/// FNV-1a 64-bit content digest.
pub fn fnv1a64(bytes: &[u8]) -> String {
    let mut hash: u64 = 0xcbf2_9ce4_8422_2325;
    for &b in bytes {
        hash ^= b as u64;
        hash = hash.wrapping_mul(0x0000_0100_0000_01b3);
    }
    format!("{hash:016x}")
}

pub fn manifest_entry(rel_name: &str, bytes: &[u8]) -> ManifestEntry {
    ManifestEntry {
        file: rel_name.to_string(),
        bytes: bytes.len() as u64,
        fnv1a64: fnv1a64(bytes),
    }
}

impl RunReport {
    pub fn new(command: &str, seed: u64, scale: f64, scenario: ScenarioConfig) -> Self {
        Self {
            command: command.to_string(),
            seed,
            tolerance_scale: scale,
            scenario,
            checks: Vec::new(),
            manifest: Vec::new(),
            passed: true,
        }
    }

    pub fn push_check(&mut self, check: CheckRecord) {
        if check.outcome == Outcome::Fail {
            self.passed = false;
        }
        self.checks.push(check);
    }

    pub fn to_json(&self) -> String {
        let mut text = serde_json::to_string_pretty(self).expect("report serialization");
        text.push('\n');
        text
    }

    /// Writes the report itself as `report.json` in `dir` (atomically) and
    /// returns its path.
    pub fn write(&self, dir: &Path) -> std::io::Result<std::path::PathBuf> {
        let path = dir.join("report.json");
        crate::output::write_atomic(&path, self.to_json().as_bytes())?;
        Ok(path)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fnv_vectors() {
        // standard FNV-1a test vectors
        assert_eq!(fnv1a64(b""), "cbf29ce484222325");
        assert_eq!(fnv1a64(b"a"), "af63dc4c8601ec8c");
        assert_eq!(fnv1a64(b"foobar"), "85944171f73967e8");
    }

    #[test]
    fn failures_flip_the_flag() {
        let mut report = RunReport::new("verify", 0, 1.0, crate::config::ScenarioConfig::default());
        report.push_check(CheckRecord {
            name: "x".into(),
            outcome: Outcome::Pass,
            defect: Some(0.0),
            tolerance: Some(1.0),
            note: None,
            ops: vec![],
        });
        assert!(report.passed);
        report.push_check(CheckRecord {
            name: "y".into(),
            outcome: Outcome::Fail,
            defect: Some(2.0),
            tolerance: Some(1.0),
            note: None,
            ops: vec![],
        });
        assert!(!report.passed);
    }
}
