use std::fmt::Write as _;
use std::path::Path;
use std::str::FromStr;

use super::eval::MetricsReport;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Json,
    Csv,
    Table,
}

impl FromStr for ReportFormat {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "json" => Ok(ReportFormat::Json),
            "csv" => Ok(ReportFormat::Csv),
            "table" | "text" | "text-table" => Ok(ReportFormat::Table),
            other => Err(format!("unknown report format `{other}`")),
        }
    }
}

pub const CSV_HEADER: [&str; 11] = [
    "model",
    "records",
    "affordance_records",
    "iou",
    "trajectory_records",
    "dfd",
    "hd",
    "rmse",
    "avg",
    "format_compliance",
    "parse_failures",
];

fn opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

/// One header line plus one row per report.
pub fn render_csv(reports: &[MetricsReport]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let ser = |e: csv::Error| Error::Serialize(e.to_string());
    w.write_record(CSV_HEADER).map_err(ser)?;
    for r in reports {
        let a = r.affordance.as_ref();
        let t = r.trajectory.as_ref();
        w.write_record([
            r.model.clone(),
            r.record_count.to_string(),
            a.map_or(0, |a| a.records).to_string(),
            opt(a.and_then(|a| a.mean_iou)),
            t.map_or(0, |t| t.records).to_string(),
            opt(t.and_then(|t| t.mean_dfd)),
            opt(t.and_then(|t| t.mean_hd)),
            opt(t.and_then(|t| t.mean_rmse)),
            opt(t.and_then(|t| t.avg)),
            opt(r.format_compliance()),
            r.parse_failures().to_string(),
        ])
        .map_err(ser)?;
    }
    let bytes = w
        .into_inner()
        .map_err(|e| Error::Serialize(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| Error::Serialize(e.to_string()))
}

fn cell(v: Option<f64>) -> String {
    v.map(|x| format!("{x:.2}")).unwrap_or_else(|| "-".into())
}

/// Markdown-style table with columns `Model | IoU | DFD | HD | RMSE | Avg`.
pub fn render_table(reports: &[MetricsReport]) -> String {
    let header = ["Model", "IoU", "DFD", "HD", "RMSE", "Avg"];
    let rows: Vec<[String; 6]> = reports
        .iter()
        .map(|r| {
            let t = r.trajectory.as_ref();
            [
                r.model.clone(),
                cell(r.affordance.as_ref().and_then(|a| a.mean_iou)),
                cell(t.and_then(|t| t.mean_dfd)),
                cell(t.and_then(|t| t.mean_hd)),
                cell(t.and_then(|t| t.mean_rmse)),
                cell(t.and_then(|t| t.avg)),
            ]
        })
        .collect();
    let widths: Vec<usize> = (0..6)
        .map(|i| {
            rows.iter()
                .map(|r| r[i].len())
                .chain([header[i].len()])
                .max()
                .unwrap_or(0)
        })
        .collect();

    let mut out = String::new();
    let line = |cells: &[String]| {
        let padded: Vec<String> = cells
            .iter()
            .zip(&widths)
            .map(|(c, w)| format!("{c:<w$}"))
            .collect();
        format!("| {} |\n", padded.join(" | "))
    };
    out.push_str(&line(&header.map(String::from)));
    let rule: Vec<String> = widths.iter().map(|w| "-".repeat(*w)).collect();
    out.push_str(&line(&rule));
    for r in &rows {
        out.push_str(&line(r));
    }
    for r in reports {
        let _ = writeln!(
            out,
            "\n{}: {} records, {} parse failures ({:?} policy); IoU: {}; RMSE: {}",
            r.model,
            r.record_count,
            r.parse_failures(),
            r.failure_policy,
            r.iou_aggregation,
            r.rmse_alignment
        );
    }
    out
}

pub fn render_report(report: &MetricsReport, format: ReportFormat) -> Result<String> {
    match format {
        ReportFormat::Json => serde_json::to_string_pretty(report)
            .map(|s| s + "\n")
            .map_err(|e| Error::Serialize(e.to_string())),
        ReportFormat::Csv => render_csv(std::slice::from_ref(report)),
        ReportFormat::Table => Ok(render_table(std::slice::from_ref(report))),
    }
}

pub fn emit_report(report: &MetricsReport, format: ReportFormat, path: &Path) -> Result<()> {
    let text = render_report(report, format)?;
    std::fs::write(path, text).map_err(|e| Error::io(path, e))
}

pub fn load_json_report(path: &Path) -> Result<MetricsReport> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    serde_json::from_str(&text).map_err(|e| Error::Serialize(e.to_string()))
}
