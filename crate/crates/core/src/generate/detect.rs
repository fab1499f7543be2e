use std::collections::{BTreeMap, HashSet};

use serde::Serialize;

use super::{GenerateError, InjectionLog, InjectionTarget};
use crate::checks::Finding;
use crate::model::Table;

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct KindDetection {
    pub injected: usize,
    pub detected: usize,
}

impl KindDetection {
    /// `None` when nothing was injected.
    pub fn recall(&self) -> Option<f64> {
        (self.injected > 0).then(|| self.detected as f64 / self.injected as f64)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct DetectionReport {
    /// Keyed by the kind's display name, e.g. `decimal-shift:+1`.
    pub per_kind: BTreeMap<String, KindDetection>,
    pub overall: KindDetection,
    pub findings_total: usize,
    /// Findings that cover at least one injected cell or row.
    pub findings_matching: usize,
}

impl DetectionReport {
    pub fn precision(&self) -> Option<f64> {
        (self.findings_total > 0).then(|| self.findings_matching as f64 / self.findings_total as f64)
    }

    pub fn render_text(&self) -> String {
        let fmt = |x: Option<f64>| x.map_or("N/A".to_string(), |v| format!("{v:.4}"));
        let mut out = String::from("kind\tinjected\tdetected\trecall\n");
        for (kind, d) in &self.per_kind {
            out.push_str(&format!(
                "{kind}\t{}\t{}\t{}\n",
                d.injected,
                d.detected,
                fmt(d.recall())
            ));
        }
        out.push_str(&format!(
            "all\t{}\t{}\t{}\n",
            self.overall.injected,
            self.overall.detected,
            fmt(self.overall.recall())
        ));
        out.push_str(&format!(
            "precision\t{} of {} findings\t{}\n",
            self.findings_matching,
            self.findings_total,
            fmt(self.precision())
        ));
        out
    }
}

/// Scores findings from a corrupted table against the injection log. An
/// injection is detected when a finding addresses its cell, or any cell in
/// its row for row-level kinds. `table` is the clean (or corrupted) table;
/// it is only used to check that the log fits.
pub fn measure_detection(
    table: &Table,
    log: &InjectionLog,
    findings: &[Finding],
) -> Result<DetectionReport, GenerateError> {
    for (i, e) in log.entries.iter().enumerate() {
        let (sheet, row, col) = match &e.target {
            InjectionTarget::Cell { address, .. } => (&address.sheet, address.row, Some(address.column)),
            InjectionTarget::Row { sheet, row, .. } => (sheet, *row, None),
        };
        let bad = if sheet != table.name() {
            Some(format!("sheet `{sheet}` is not `{}`", table.name()))
        } else if row == 0 || row as usize > table.row_count() {
            Some(format!("row {row} of {}", table.row_count()))
        } else if col.is_some_and(|c| c == 0 || c as usize > table.column_count()) {
            Some(format!("column {} of {}", col.unwrap_or(0), table.column_count()))
        } else {
            None
        };
        if let Some(reason) = bad {
            return Err(GenerateError::LogMismatch { entry: i, reason });
        }
    }
    let mut cells: HashSet<(&str, u32, u32)> = HashSet::new();
    let mut rows: HashSet<(&str, u32)> = HashSet::new();
    for f in findings {
        for a in &f.addresses {
            cells.insert((a.sheet.as_str(), a.row, a.column));
            rows.insert((a.sheet.as_str(), a.row));
        }
    }
    let mut report = DetectionReport {
        findings_total: findings.len(),
        ..Default::default()
    };
    let mut hit_cells: HashSet<(&str, u32, u32)> = HashSet::new();
    let mut hit_rows: HashSet<(&str, u32)> = HashSet::new();
    for e in &log.entries {
        let detected = match &e.target {
            InjectionTarget::Cell { address, .. } => {
                let key = (address.sheet.as_str(), address.row, address.column);
                hit_cells.insert(key);
                cells.contains(&key)
            }
            InjectionTarget::Row { sheet, row, .. } => {
                hit_rows.insert((sheet.as_str(), *row));
                rows.contains(&(sheet.as_str(), *row))
            }
        };
        let entry = report.per_kind.entry(e.kind.to_string()).or_default();
        entry.injected += 1;
        report.overall.injected += 1;
        if detected {
            entry.detected += 1;
            report.overall.detected += 1;
        }
    }
    report.findings_matching = findings
        .iter()
        .filter(|f| {
            f.addresses.iter().any(|a| {
                hit_cells.contains(&(a.sheet.as_str(), a.row, a.column))
                    || hit_rows.contains(&(a.sheet.as_str(), a.row))
            })
        })
        .count();
    Ok(report)
}
