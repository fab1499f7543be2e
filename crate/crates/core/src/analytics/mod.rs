//! Statistics and pattern checks over single columns and tables.

mod benford;
mod duplicates;
mod patterns;
mod stats;

pub use benford::{benford, benford_finding, leading_digit, BenfordResult, BENFORD_CRITICAL};
pub use duplicates::{
    classify_step, duplicate_findings, find_duplicates, find_gaps, gap_findings, DuplicateReport, Gap,
    GapReport, IrregularStep, StepClass,
};
pub use patterns::{
    dominance, find_suspicious, outlier_findings, outliers, quartile, suspicious_in_column, Dominance,
    OutlierReport, SuspiciousPatterns, DOMINANCE_MIN_DISTINCT, DOMINANCE_MIN_VALUES,
};
pub use stats::{
    cross_tabulate, descriptive_stats, rational_to_decimal, stratify, Band, CrossTab, StatsSummary, Strata,
};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AnalyticsError {
    #[error("bad bands: {0}")]
    BadBands(String),
    #[error("columns differ in length ({left} vs {right})")]
    LengthMismatch { left: usize, right: usize },
    #[error("table `{table}` has no column `{column}`")]
    MissingColumn { table: String, column: String },
    #[error("column `{column}` holds values that cannot be ordered numerically")]
    NonOrderable { column: String },
    #[error("column `{column}` is not numeric")]
    NotNumeric { column: String },
    #[error("column `{column}` has {found} values, at least {needed} are needed")]
    TooFewValues {
        column: String,
        found: usize,
        needed: usize,
    },
    #[error("invalid parameter: {0}")]
    BadParameter(String),
}
