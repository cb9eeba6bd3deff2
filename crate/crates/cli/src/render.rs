//! Text encodings of the reports.

use std::fmt::Write;

use serde::Serialize;

use crate::manifest::{Document, RunManifest};

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

pub fn json<R: Serialize>(manifest: &RunManifest, report: &R) -> String {
    let doc = Document { manifest: manifest.clone(), report };
    let mut s = serde_json::to_string_pretty(&doc).expect("reports serialize");
    s.push('\n');
    s
}

/// CSV with the manifest as a leading `# manifest: {json}` comment line.
pub fn csv(manifest: &RunManifest, header: &str, rows: &[Vec<String>]) -> String {
    let mut s = String::new();
    writeln!(s, "# manifest: {}", serde_json::to_string(manifest).expect("manifest serializes")).unwrap();
    writeln!(s, "{header}").unwrap();
    for row in rows {
        writeln!(s, "{}", row.iter().map(|c| quote(c)).collect::<Vec<_>>().join(",")).unwrap();
    }
    s
}

/// Reads the manifest back from a CSV produced by [`csv`].
pub fn csv_manifest(text: &str) -> Option<RunManifest> {
    let line = text.lines().next()?.strip_prefix("# manifest: ")?;
    serde_json::from_str(line).ok()
}

fn quote(cell: &str) -> String {
    if cell.contains([',', '"', '\n']) {
        format!("\"{}\"", cell.replace('"', "\"\""))
    } else {
        cell.to_string()
    }
}

/// Shortest of fixed or scientific notation carrying 15 significant digits.
pub fn sig15(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return format!("{x}");
    }
    let exponent = x.abs().log10().floor() as i32;
    if (-5..15).contains(&exponent) {
        let decimals = (14 - exponent).max(0) as usize;
        let s = format!("{x:.decimals$}");
        if s.contains('.') {
            s.trim_end_matches('0').trim_end_matches('.').to_string()
        } else {
            s
        }
    } else {
        format!("{x:.14e}")
    }
}

pub fn opt(x: Option<f64>) -> String {
    x.map(sig15).unwrap_or_default()
}
