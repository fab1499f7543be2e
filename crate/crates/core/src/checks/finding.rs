use std::cmp::Ordering;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::model::{column_letters, CellAddress, CellValue};

/// Information-quality dimensions a finding can be attributed to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Dimension {
    Accessible,
    Accuracy,
    AppropriateAmount,
    Atomic,
    Believable,
    Complete,
    Concise,
    Coverage,
    Conformity,
    Consistent,
    Coherence,
    Interpretable,
    Meaning,
    Objective,
    Redundancy,
    Relevant,
    Reputable,
    Secure,
    Timely,
    Understandable,
    Usability,
    Value,
    Validity,
}

impl Dimension {
    pub const ALL: [Dimension; 23] = [
        Dimension::Accessible,
        Dimension::Accuracy,
        Dimension::AppropriateAmount,
        Dimension::Atomic,
        Dimension::Believable,
        Dimension::Complete,
        Dimension::Concise,
        Dimension::Coverage,
        Dimension::Conformity,
        Dimension::Consistent,
        Dimension::Coherence,
        Dimension::Interpretable,
        Dimension::Meaning,
        Dimension::Objective,
        Dimension::Redundancy,
        Dimension::Relevant,
        Dimension::Reputable,
        Dimension::Secure,
        Dimension::Timely,
        Dimension::Understandable,
        Dimension::Usability,
        Dimension::Value,
        Dimension::Validity,
    ];

    /// Dimensions with no automated check; scorecards carry them as
    /// free-text annotations.
    pub const MANUAL: [Dimension; 7] = [
        Dimension::Believable,
        Dimension::Reputable,
        Dimension::Objective,
        Dimension::Value,
        Dimension::Secure,
        Dimension::Accessible,
        Dimension::Timely,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Dimension::Accessible => "Accessible",
            Dimension::Accuracy => "Accuracy",
            Dimension::AppropriateAmount => "AppropriateAmount",
            Dimension::Atomic => "Atomic",
            Dimension::Believable => "Believable",
            Dimension::Complete => "Complete",
            Dimension::Concise => "Concise",
            Dimension::Coverage => "Coverage",
            Dimension::Conformity => "Conformity",
            Dimension::Consistent => "Consistent",
            Dimension::Coherence => "Coherence",
            Dimension::Interpretable => "Interpretable",
            Dimension::Meaning => "Meaning",
            Dimension::Objective => "Objective",
            Dimension::Redundancy => "Redundancy",
            Dimension::Relevant => "Relevant",
            Dimension::Reputable => "Reputable",
            Dimension::Secure => "Secure",
            Dimension::Timely => "Timely",
            Dimension::Understandable => "Understandable",
            Dimension::Usability => "Usability",
            Dimension::Value => "Value",
            Dimension::Validity => "Validity",
        }
    }
}

impl fmt::Display for Dimension {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for Dimension {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Dimension::ALL
            .iter()
            .copied()
            .find(|d| d.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| format!("unknown quality dimension `{s}`"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Severity {
    Info,
    Warning,
    Error,
}

impl fmt::Display for Severity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Severity::Info => "INFO",
            Severity::Warning => "WARNING",
            Severity::Error => "ERROR",
        })
    }
}

impl std::str::FromStr for Severity {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "info" => Ok(Severity::Info),
            "warning" | "warn" => Ok(Severity::Warning),
            "error" => Ok(Severity::Error),
            _ => Err(format!("unknown severity `{s}`")),
        }
    }
}

/// One detected defect.
///
/// Cell-level findings list the offending cells in `addresses`. Findings
/// about whole columns (ambiguous headers, dominance, Benford) leave
/// `addresses` empty and name the 1-based column positions in `columns`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Finding {
    pub table: String,
    pub check_id: String,
    pub dimension: Dimension,
    pub severity: Severity,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub addresses: Vec<CellAddress>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub columns: Vec<u32>,
    pub message: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub observed: Option<CellValue>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub expected: Option<String>,
}

impl Finding {
    /// Starts a finding for a registered check, taking its dimension and
    /// default severity from the registry.
    pub fn new(table: &str, check_id: &str, message: impl Into<String>) -> Self {
        let info =
            super::check_info(check_id).unwrap_or_else(|| panic!("check `{check_id}` is not registered"));
        Self {
            table: table.to_string(),
            check_id: info.id.to_string(),
            dimension: info.dimension,
            severity: info.severity,
            addresses: Vec::new(),
            columns: Vec::new(),
            message: message.into(),
            observed: None,
            expected: None,
        }
    }

    pub fn at(mut self, address: CellAddress) -> Self {
        self.addresses.push(address);
        self
    }

    pub fn at_all(mut self, addresses: impl IntoIterator<Item = CellAddress>) -> Self {
        self.addresses.extend(addresses);
        self
    }

    pub fn on_columns(mut self, columns: impl IntoIterator<Item = u32>) -> Self {
        self.columns.extend(columns);
        self
    }

    pub fn observed(mut self, value: CellValue) -> Self {
        self.observed = Some(value);
        self
    }

    pub fn expected(mut self, expected: impl Into<String>) -> Self {
        self.expected = Some(expected.into());
        self
    }

    pub fn severity(mut self, severity: Severity) -> Self {
        self.severity = severity;
        self
    }

    /// Spreadsheet-style location: `B3` for cells, `C:C` for columns, `*`
    /// for the whole table.
    pub fn location(&self) -> String {
        if let Some(first) = self.addresses.first() {
            first.a1()
        } else if let Some(&col) = self.columns.first() {
            let letters = column_letters(col);
            format!("{letters}:{letters}")
        } else {
            "*".to_string()
        }
    }

    fn position_key(&self) -> (u32, u32) {
        match (self.addresses.first(), self.columns.first()) {
            (Some(a), _) => (a.row, a.column),
            (None, Some(&c)) => (0, c),
            (None, None) => (0, 0),
        }
    }

    /// Canonical order: table, check id, first location, then the remaining
    /// fields so that equal-looking findings still sort deterministically.
    pub fn canonical_cmp(&self, other: &Self) -> Ordering {
        self.table
            .cmp(&other.table)
            .then_with(|| self.check_id.cmp(&other.check_id))
            .then_with(|| self.position_key().cmp(&other.position_key()))
            .then_with(|| self.message.cmp(&other.message))
            .then_with(|| self.addresses.cmp(&other.addresses))
            .then_with(|| self.columns.cmp(&other.columns))
            .then_with(|| self.severity.cmp(&other.severity))
            .then_with(|| self.dimension.cmp(&other.dimension))
            .then_with(|| self.observed.cmp(&other.observed))
            .then_with(|| self.expected.cmp(&other.expected))
    }
}

pub fn sort_findings(findings: &mut [Finding]) {
    findings.sort_by(Finding::canonical_cmp);
}
