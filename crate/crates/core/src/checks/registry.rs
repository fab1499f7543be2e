use super::{Dimension, Severity};

/// A registered check: its id, the dimension its findings count toward and
/// the severity it reports at unless remapped.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CheckInfo {
    pub id: &'static str,
    pub dimension: Dimension,
    pub severity: Severity,
    pub description: &'static str,
}

const fn info(
    id: &'static str,
    dimension: Dimension,
    severity: Severity,
    description: &'static str,
) -> CheckInfo {
    CheckInfo {
        id,
        dimension,
        severity,
        description,
    }
}

/// Every check the engine can emit.
pub const CHECKS: &[CheckInfo] = &[
    info(
        "ambiguity",
        Dimension::Meaning,
        Severity::Warning,
        "more than one column with the same name",
    ),
    info(
        "atomicity",
        Dimension::Atomic,
        Severity::Warning,
        "text holding several values joined by a delimiter",
    ),
    info(
        "benford",
        Dimension::Accuracy,
        Severity::Warning,
        "leading digits deviate from Benford's distribution",
    ),
    info(
        "consistency",
        Dimension::Consistent,
        Severity::Error,
        "row violates a when/expect consistency rule",
    ),
    info(
        "dominance",
        Dimension::Accuracy,
        Severity::Warning,
        "one valid value dominates the column",
    ),
    info(
        "duplicate-row",
        Dimension::Redundancy,
        Severity::Warning,
        "rows identical in every column",
    ),
    info(
        "foreign-key",
        Dimension::Coherence,
        Severity::Error,
        "value absent from the referenced parent key",
    ),
    info(
        "format",
        Dimension::Conformity,
        Severity::Warning,
        "text does not follow the declared format",
    ),
    info(
        "gap",
        Dimension::Complete,
        Severity::Warning,
        "missing values in a key sequence",
    ),
    info(
        "irregular-step",
        Dimension::Conformity,
        Severity::Warning,
        "key sequence step is not a multiple of the declared step",
    ),
    info(
        "key-null",
        Dimension::Complete,
        Severity::Error,
        "null in a primary-key column",
    ),
    info(
        "not-null",
        Dimension::Complete,
        Severity::Error,
        "null in a non-nullable column",
    ),
    info(
        "outlier",
        Dimension::Accuracy,
        Severity::Warning,
        "value outside the interquartile fences",
    ),
    info(
        "primary-key",
        Dimension::Redundancy,
        Severity::Error,
        "primary key value shared by several rows",
    ),
    info(
        "range",
        Dimension::Validity,
        Severity::Error,
        "value outside the declared minimum..maximum",
    ),
    info(
        "rule-binding",
        Dimension::Consistent,
        Severity::Error,
        "consistency rule names an unknown column",
    ),
    info(
        "schema-binding",
        Dimension::Coverage,
        Severity::Error,
        "declared column missing from the table",
    ),
    info(
        "size",
        Dimension::Validity,
        Severity::Error,
        "text longer than the declared size",
    ),
    info(
        "suspicious",
        Dimension::Accuracy,
        Severity::Warning,
        "placeholder-looking value (all nines, 2001-01-01, TBD)",
    ),
    info(
        "timeliness",
        Dimension::Timely,
        Severity::Warning,
        "source file older than the allowed age",
    ),
    info(
        "type",
        Dimension::Validity,
        Severity::Error,
        "value of the wrong data type",
    ),
    info(
        "values",
        Dimension::Validity,
        Severity::Error,
        "value not in the restricted value list",
    ),
];

pub fn check_info(id: &str) -> Option<&'static CheckInfo> {
    CHECKS.iter().find(|c| c.id == id)
}

pub fn check_ids() -> impl Iterator<Item = &'static str> {
    CHECKS.iter().map(|c| c.id)
}
