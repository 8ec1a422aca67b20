use std::fmt::Write as _;
use std::fs;
use std::path::Path;
use std::str::FromStr;

use super::evaluate::{EvalReport, RecordRow};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Table,
    Json,
    Csv,
}

impl FromStr for ReportFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "table" | "human-table" | "human" => Ok(ReportFormat::Table),
            "json" => Ok(ReportFormat::Json),
            "csv" => Ok(ReportFormat::Csv),
            other => Err(Error::InvalidConfig(format!("unknown report format {other:?}"))),
        }
    }
}

pub fn render_report(report: &EvalReport, format: ReportFormat, label: &str) -> String {
    match format {
        ReportFormat::Table => render_table(report, label),
        ReportFormat::Json => serde_json::to_string_pretty(report).expect("report serializes") + "\n",
        ReportFormat::Csv => render_csv(&report.rows),
    }
}

pub fn emit_report(report: &EvalReport, format: ReportFormat, label: &str, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    fs::write(path, render_report(report, format, label)).map_err(|e| Error::io(path, e))
}

fn render_table(report: &EvalReport, label: &str) -> String {
    let pct = |x: f64| format!("{:.2}%", x * 100.0);
    let header = ["Model", "JSON Validity", "Overall Accuracy"];
    let row = [label.to_string(), pct(report.json_validity), pct(report.overall_accuracy)];
    let widths: Vec<usize> = header.iter().zip(&row).map(|(h, r)| h.len().max(r.len())).collect();

    let mut out = String::new();
    let line = |cells: &[&str]| {
        let padded: Vec<String> = cells.iter().zip(&widths).map(|(c, w)| format!(" {c:<w$} ")).collect();
        format!("|{}|\n", padded.join("|"))
    };
    out.push_str(&line(&header));
    let rule: Vec<String> = widths.iter().map(|w| "-".repeat(w + 2)).collect();
    let _ = writeln!(out, "|{}|", rule.join("|"));
    out.push_str(&line(&row.iter().map(String::as_str).collect::<Vec<_>>()));
    let _ = writeln!(out);
    let _ = writeln!(out, "records: {}  missing: {}", report.n_records, report.n_missing);
    let _ = writeln!(out, "mean reward: {:.4}", report.mean_reward);
    let _ = writeln!(out, "mean completion chars: {:.1}", report.mean_completion_chars);
    let counts: Vec<String> = report
        .outcome_counts()
        .into_iter()
        .filter(|(_, n)| *n > 0)
        .map(|(t, n)| format!("{t}={n}"))
        .collect();
    let _ = writeln!(out, "outcomes: {}", counts.join(" "));
    out
}

fn render_csv(rows: &[RecordRow]) -> String {
    let mut writer = csv::Writer::from_writer(Vec::new());
    for row in rows {
        writer.serialize(row).expect("rows serialize to CSV");
    }
    if rows.is_empty() {
        writer
            .write_record(["id", "outcome", "r_final", "exact_match", "json_valid", "completion_chars", "missing"])
            .expect("header");
    }
    String::from_utf8(writer.into_inner().expect("flush to Vec")).expect("CSV is UTF-8")
}

/// Reads per-record CSV rows back and recomputes the aggregates.
pub fn parse_report_csv(text: &str) -> Result<EvalReport> {
    let mut reader = csv::Reader::from_reader(text.as_bytes());
    let rows = reader
        .deserialize::<RecordRow>()
        .collect::<std::result::Result<Vec<_>, _>>()
        .map_err(|e| Error::Validation(format!("report CSV: {e}")))?;
    Ok(EvalReport::from_rows(rows))
}

pub fn parse_report_json(text: &str) -> Result<EvalReport> {
    serde_json::from_str(text).map_err(|e| Error::Validation(format!("report JSON: {e}")))
}
