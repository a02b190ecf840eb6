//! CSV and JSON emission. Schemas are versioned in a header comment line
//! so downstream plotting scripts stay stable; files are written
//! atomically (temp + rename).

use anyhow::{Context, Result};
use modsmooth_core::verify::VerificationReport;
use serde::{Deserialize, Serialize};
use std::fs;
use std::path::{Path, PathBuf};

pub const SCHEMA_LINE: &str = "#schema=1";

pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = path.parent().unwrap_or_else(|| Path::new("."));
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    let tmp = path.with_extension("tmp");
    fs::write(&tmp, bytes).with_context(|| format!("writing {}", tmp.display()))?;
    fs::rename(&tmp, path).with_context(|| format!("renaming into {}", path.display()))?;
    Ok(())
}

pub fn csv_document(header: &str, rows: &[String]) -> Vec<u8> {
    let mut doc = String::with_capacity(rows.len() * 32 + 64);
    doc.push_str(SCHEMA_LINE);
    doc.push('\n');
    doc.push_str(header);
    doc.push('\n');
    for row in rows {
        doc.push_str(row);
        doc.push('\n');
    }
    doc.into_bytes()
}

/// Serializable mirror of a verification report (the core crate stays
/// serde-free).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ReportRecord {
    pub theorem_id: String,
    pub rows: Vec<(String, f64, f64)>,
    pub fitted_constant: f64,
    pub cap: f64,
    pub verdict: String,
    pub tolerance_note: String,
}

impl From<&VerificationReport> for ReportRecord {
    fn from(r: &VerificationReport) -> Self {
        ReportRecord {
            theorem_id: r.theorem_id.clone(),
            rows: r.rows.iter().map(|row| (row.params.clone(), row.lhs, row.rhs)).collect(),
            fitted_constant: r.fitted_constant,
            cap: r.cap,
            verdict: r.verdict.to_string(),
            tolerance_note: r.tolerance_note.clone(),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SummaryEntry {
    pub theorem_id: String,
    pub fitted_constant: f64,
    pub cap: f64,
    pub verdict: String,
}

pub fn report_csv(record: &ReportRecord) -> Vec<u8> {
    let rows: Vec<String> = record
        .rows
        .iter()
        .map(|(params, lhs, rhs)| {
            let ratio = if lhs.abs() < 1e-12 && rhs.abs() < 1e-12 { 0.0 } else { lhs / rhs };
            format!("{},{params},{lhs},{rhs},{ratio}", record.theorem_id)
        })
        .collect();
    csv_document("theorem_id,params,lhs,rhs,ratio", &rows)
}

/// File-system-safe name for a report.
pub fn report_file_name(theorem_id: &str) -> String {
    let mut out = String::with_capacity(theorem_id.len() + 11);
    out.push_str("verify_");
    for c in theorem_id.chars() {
        out.push(match c {
            'a'..='z' | 'A'..='Z' | '0'..='9' | '-' | '_' | '.' => c,
            _ => '_',
        });
    }
    out.push_str(".csv");
    out
}

pub fn write_summary(dir: &Path, entries: &[SummaryEntry]) -> Result<PathBuf> {
    let path = dir.join("summary.json");
    let body = serde_json::to_vec_pretty(entries).context("serializing summary")?;
    write_atomic(&path, &body)?;
    Ok(path)
}

pub fn read_summary(dir: &Path) -> Result<Vec<SummaryEntry>> {
    let path = dir.join("summary.json");
    let body = fs::read(&path).with_context(|| format!("reading {}", path.display()))?;
    serde_json::from_slice(&body).context("parsing summary.json")
}
