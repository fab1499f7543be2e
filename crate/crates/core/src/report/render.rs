use std::collections::{BTreeMap, BTreeSet};
use std::io::Write;

use serde::{Deserialize, Serialize};

use super::{ReportError, Scorecard};
use crate::checks::{sort_findings, Finding, Severity};
use crate::ingest::{write_csv, IngestOptions};
use crate::model::{CellValue, Column, Table};

/// Version of the structured report document.
pub const SCHEMA_VERSION: u32 = 1;

/// Name of the column appended by the annotated-table format.
pub const FLAGS_COLUMN: &str = "__dq_flags";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Text,
    Structured,
    AnnotatedTable,
}

impl std::str::FromStr for ReportFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "text" => Ok(ReportFormat::Text),
            "structured" | "json" => Ok(ReportFormat::Structured),
            "annotated-table" | "annotated" | "csv" => Ok(ReportFormat::AnnotatedTable),
            _ => Err(format!(
                "unknown format `{s}` (expected text, structured or annotated-table)"
            )),
        }
    }
}

/// The structured document.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StructuredReport {
    pub schema_version: u32,
    pub finding_count: usize,
    pub findings: Vec<Finding>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scorecard: Option<Scorecard>,
}

/// `<table>!<location> [<SEVERITY>] <check_id>: <message>`
pub fn finding_line(f: &Finding) -> String {
    format!(
        "{}!{} [{}] {}: {}",
        f.table,
        f.location(),
        f.severity,
        f.check_id,
        f.message
    )
}

fn plural(n: usize, word: &str) -> String {
    format!("{n} {word}{}", if n == 1 { "" } else { "s" })
}

/// Writes `findings` in the chosen format. Findings are sorted canonically
/// first. The annotated-table format needs the audited `tables`; each is
/// written in turn, separated by a blank line when there are several.
pub fn render_report(
    findings: &[Finding],
    scorecard: Option<&Scorecard>,
    tables: &[&Table],
    format: ReportFormat,
    out: &mut dyn Write,
) -> Result<(), ReportError> {
    let mut sorted = findings.to_vec();
    sort_findings(&mut sorted);
    match format {
        ReportFormat::Text => out.write_all(render_text(&sorted, scorecard).as_bytes())?,
        ReportFormat::Structured => {
            let doc = StructuredReport {
                schema_version: SCHEMA_VERSION,
                finding_count: sorted.len(),
                findings: sorted,
                scorecard: scorecard.cloned(),
            };
            serde_json::to_writer_pretty(&mut *out, &doc)?;
            out.write_all(b"\n")?;
        }
        ReportFormat::AnnotatedTable => {
            for (i, table) in tables.iter().enumerate() {
                if i > 0 {
                    out.write_all(b"\n")?;
                }
                write_csv(&annotate(table, &sorted), &mut *out, &IngestOptions::default())
                    .map_err(|e| ReportError::Write(std::io::Error::other(e.to_string())))?;
            }
        }
    }
    Ok(())
}

pub fn render_text(sorted: &[Finding], scorecard: Option<&Scorecard>) -> String {
    let mut s = String::from("data-quality report\n");
    for f in sorted {
        s.push_str(&finding_line(f));
        s.push('\n');
    }
    s.push_str(&plural(sorted.len(), "finding"));
    s.push('\n');
    if let Some(card) = scorecard {
        s.push_str(&format!(
            "\nscorecard: overall error rate {} ({} of {} cells)\n",
            card.overall_error_rate, card.cells_flagged, card.cells_checked
        ));
        for d in card.dimensions.iter().filter(|d| d.findings > 0) {
            s.push_str(&format!(
                "  {:<14} rate {} ({}, {})\n",
                d.dimension.name(),
                d.rate,
                plural(d.cells_flagged as usize, "cell"),
                plural(d.findings as usize, "finding")
            ));
        }
        for (d, note) in &card.manual_dimensions {
            s.push_str(&format!("  {d:<14} manual: {note}\n"));
        }
    }
    s
}

/// The table plus a trailing column naming, per row, the checks that
/// flagged any of its cells.
pub fn annotate(table: &Table, findings: &[Finding]) -> Table {
    let mut flags: BTreeMap<u32, BTreeSet<&str>> = BTreeMap::new();
    for f in findings {
        for a in f.addresses.iter().filter(|a| a.sheet == table.name()) {
            flags.entry(a.row).or_default().insert(&f.check_id);
        }
    }
    let cells = (1..=table.row_count() as u32)
        .map(|r| match flags.get(&r) {
            Some(ids) => CellValue::Text(ids.iter().copied().collect::<Vec<_>>().join(";")),
            None => CellValue::Null,
        })
        .collect();
    let mut columns = table.columns().to_vec();
    columns.push(Column::new(FLAGS_COLUMN, cells));
    Table::new(table.name(), columns).expect("flag column matches row count")
}

pub fn parse_structured(text: &str) -> Result<StructuredReport, ReportError> {
    let doc: StructuredReport = serde_json::from_str(text)?;
    if doc.schema_version != SCHEMA_VERSION {
        return Err(ReportError::Version(doc.schema_version));
    }
    if doc.finding_count != doc.findings.len() {
        return Err(ReportError::Inconsistent(format!(
            "finding_count {} but {} findings",
            doc.finding_count,
            doc.findings.len()
        )));
    }
    Ok(doc)
}

/// 0 without findings, 1 when the worst is a warning or info, 2 with errors.
pub fn exit_status(findings: &[Finding]) -> i32 {
    match findings.iter().map(|f| f.severity).max() {
        None => 0,
        Some(Severity::Error) => 2,
        Some(_) => 1,
    }
}
