//! Report containers and emission.
//!
//! Every emitted file starts with a `#`-prefixed provenance block (tool
//! version, config digest, input digest — never timestamps), then a CSV
//! header and data rows. Identical config and input therefore produce
//! byte-identical files. A JSON mirror of the same content is available
//! behind a flag, and each figure-backed report can be reshaped into tidy
//! long-format plot data.

use std::io::Write;
use std::path::Path;

use serde::Serialize;

use crate::corpus::sha256_bytes;
use crate::error::{LensError, Result};

pub const TOOL_VERSION: &str = concat!("lens ", env!("CARGO_PKG_VERSION"));

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Provenance {
    pub tool_version: String,
    pub config_digest: String,
    pub input_digest: String,
}

impl Provenance {
    pub fn new(config_digest: impl Into<String>, input_digest: impl Into<String>) -> Self {
        Self {
            tool_version: TOOL_VERSION.to_string(),
            config_digest: config_digest.into(),
            input_digest: input_digest.into(),
        }
    }
}

/// One tabular report: header, string rows, provenance, plus free-form
/// summary key/value pairs that land in the comment block.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MetricReport {
    pub kind: String,
    pub provenance: Provenance,
    pub summary: Vec<(String, String)>,
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl MetricReport {
    pub fn new(kind: impl Into<String>, header: &[&str], provenance: Provenance) -> MetricReport {
        MetricReport {
            kind: kind.into(),
            provenance,
            summary: Vec::new(),
            header: header.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push_row(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn add_summary(&mut self, key: impl Into<String>, value: impl Into<String>) {
        self.summary.push((key.into(), value.into()));
    }

    /// Serializes to CSV with the provenance comment block on top.
    pub fn to_csv_bytes(&self) -> Result<Vec<u8>> {
        let mut out = Vec::new();
        writeln!(out, "# report: {}", self.kind)?;
        writeln!(out, "# tool_version: {}", self.provenance.tool_version)?;
        writeln!(out, "# config_digest: {}", self.provenance.config_digest)?;
        writeln!(out, "# input_digest: {}", self.provenance.input_digest)?;
        for (key, value) in &self.summary {
            writeln!(out, "# {key}: {value}")?;
        }
        let mut w = csv::Writer::from_writer(out);
        w.write_record(&self.header).map_err(csv_err)?;
        for row in &self.rows {
            w.write_record(row).map_err(csv_err)?;
        }
        w.into_inner().map_err(|e| LensError::Config(e.to_string()))
    }

    pub fn to_json_bytes(&self) -> Result<Vec<u8>> {
        let mut bytes = serde_json::to_vec_pretty(self)
            .map_err(|e| LensError::Config(format!("serializing report: {e}")))?;
        bytes.push(b'\n');
        Ok(bytes)
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let bytes = self.to_csv_bytes()?;
        write_atomic(path, &bytes)
    }

    pub fn write_json(&self, path: &Path) -> Result<()> {
        let bytes = self.to_json_bytes()?;
        write_atomic(path, &bytes)
    }

    /// SHA-256 over the CSV serialization; the determinism checks compare
    /// these.
    pub fn digest(&self) -> Result<String> {
        Ok(sha256_bytes(&self.to_csv_bytes()?))
    }

    fn column(&self, name: &str) -> Option<usize> {
        self.header.iter().position(|h| h == name)
    }
}

fn csv_err(e: csv::Error) -> LensError {
    LensError::Config(format!("writing CSV: {e}"))
}

/// Writes through a temp file and renames, so failed runs never leave a
/// half-written report behind.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let tmp = path.with_extension("tmp");
    std::fs::write(&tmp, bytes)
        .map_err(|e| LensError::io_context(format!("writing {}", tmp.display()), e))?;
    std::fs::rename(&tmp, path)
        .map_err(|e| LensError::io_context(format!("renaming to {}", path.display()), e))?;
    Ok(())
}

/// Plot-data header shared by every figure extraction.
pub const PLOT_HEADER: [&str; 3] = ["x", "series", "y"];

/// Reshapes a report into tidy (x, series, y) rows for external plotting.
/// Returns `None` for report kinds that do not back a figure.
pub fn emit_plot_data(report: &MetricReport) -> Option<MetricReport> {
    let mut plot = MetricReport::new(
        format!("plot_{}", report.kind),
        &PLOT_HEADER,
        report.provenance.clone(),
    );
    let mut take = |xs: &str, series: &str, ys: &str| -> Option<()> {
        let x = report.column(xs)?;
        let s = report.column(series)?;
        let y = report.column(ys)?;
        for row in &report.rows {
            if row[y].is_empty() {
                continue; // undefined points are flagged, never fabricated
            }
            plot.push_row(vec![row[x].clone(), row[s].clone(), row[y].clone()]);
        }
        Some(())
    };

    match report.kind.as_str() {
        "careers" => take("career_length", "scope", "pct")?,
        "periods" => take("period", "cohort", "mean_pubs")?,
        "venue_mix" => take("bin_low", "area", "pct")?,
        "growth" => {
            // The figure overlays the corpus absolute growth with the areas'
            // relative growth.
            let scope = report.column("scope")?;
            let year = report.column("year")?;
            let abs = report.column("abs_growth")?;
            let rel = report.column("rel_growth")?;
            for row in &report.rows {
                let (series, value) = if row[scope] == "CS" {
                    (format!("{}:abs", row[scope]), &row[abs])
                } else {
                    (format!("{}:rel", row[scope]), &row[rel])
                };
                if value.is_empty() {
                    continue;
                }
                plot.push_row(vec![row[year].clone(), series, value.clone()]);
            }
        }
        "compare_growth" => {
            let year = report.column("year")?;
            let top = report.column("mean_abs_top")?;
            let nontop = report.column("mean_abs_nontop")?;
            for row in &report.rows {
                if !row[top].is_empty() {
                    plot.push_row(vec![row[year].clone(), "TOP".into(), row[top].clone()]);
                }
                if !row[nontop].is_empty() {
                    plot.push_row(vec![
                        row[year].clone(),
                        "NONTOP".into(),
                        row[nontop].clone(),
                    ]);
                }
            }
        }
        _ => return None,
    }
    Some(plot)
}

/// Deterministic float formatting for report cells: up to six decimals,
/// trailing zeros trimmed.
pub fn fmt_f64(value: f64) -> String {
    if !value.is_finite() {
        return String::new();
    }
    let mut s = format!("{value:.6}");
    if s.contains('.') {
        while s.ends_with('0') {
            s.pop();
        }
        if s.ends_with('.') {
            s.pop();
        }
    }
    s
}

/// Empty cell for undefined values.
pub fn fmt_opt(value: Option<f64>) -> String {
    value.map(fmt_f64).unwrap_or_default()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn provenance() -> Provenance {
        Provenance::new("cfg", "input")
    }

    #[test]
    fn csv_has_provenance_block() {
        let mut r = MetricReport::new("careers", &["scope", "career_length", "pct"], provenance());
        r.push_row(vec!["CS".into(), "1".into(), "50".into()]);
        let text = String::from_utf8(r.to_csv_bytes().unwrap()).unwrap();
        assert!(text.starts_with("# report: careers\n"));
        assert!(text.contains("# config_digest: cfg\n"));
        assert!(text.contains("scope,career_length,pct\n"));
        assert!(text.ends_with("CS,1,50\n"));
    }

    #[test]
    fn identical_reports_have_identical_digests() {
        let mk = || {
            let mut r = MetricReport::new("growth", &["scope", "year"], provenance());
            r.push_row(vec!["CS".into(), "2001".into()]);
            r
        };
        assert_eq!(mk().digest().unwrap(), mk().digest().unwrap());
    }

    #[test]
    fn plot_data_career_histogram() {
        let mut r = MetricReport::new(
            "careers",
            &["scope", "career_length", "authors", "pct"],
            provenance(),
        );
        r.push_row(vec!["CS".into(), "1".into(), "5".into(), "50".into()]);
        r.push_row(vec!["CS".into(), "2".into(), "5".into(), "50".into()]);
        let plot = emit_plot_data(&r).unwrap();
        assert_eq!(plot.header, vec!["x", "series", "y"]);
        assert_eq!(plot.rows.len(), 2);
        assert_eq!(plot.rows[0], vec!["1", "CS", "50"]);
    }

    #[test]
    fn empty_report_gives_header_only_plot() {
        let r = MetricReport::new(
            "careers",
            &["scope", "career_length", "authors", "pct"],
            provenance(),
        );
        let plot = emit_plot_data(&r).unwrap();
        assert!(plot.rows.is_empty());
        let text = String::from_utf8(plot.to_csv_bytes().unwrap()).unwrap();
        assert!(text.trim_end().ends_with("x,series,y"));
    }

    #[test]
    fn float_formatting() {
        assert_eq!(fmt_f64(1.2), "1.2");
        assert_eq!(fmt_f64(0.5), "0.5");
        assert_eq!(fmt_f64(1.0), "1");
        assert_eq!(fmt_f64(0.712345678), "0.712346");
        assert_eq!(fmt_opt(None), "");
    }
}
