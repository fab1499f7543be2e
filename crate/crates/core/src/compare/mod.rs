//! Comparing and combining tables.

mod align;
mod combine;
mod diff;

pub use align::{align_by_sequence, lcs_length, SequenceAlignment};
pub use combine::{extract_unique, match_merge, set_membership, JoinKind, Membership};
pub use diff::{diff_tables, AlignMode, CellDiff, DiffOptions, DiffResult};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CompareError {
    #[error("shapes differ: {left_rows}x{left_cols} vs {right_rows}x{right_cols}")]
    ShapeMismatch {
        left_rows: usize,
        left_cols: usize,
        right_rows: usize,
        right_cols: usize,
    },
    #[error("key {key} occurs more than once in `{table}`")]
    DuplicateKey { table: String, key: String },
    #[error("table `{table}` has no column `{column}`")]
    MissingColumn { table: String, column: String },
}

fn resolve(table: &crate::model::Table, names: &[impl AsRef<str>]) -> Result<Vec<usize>, CompareError> {
    names
        .iter()
        .map(|n| {
            table
                .column_index(n.as_ref())
                .ok_or_else(|| CompareError::MissingColumn {
                    table: table.name().to_string(),
                    column: n.as_ref().to_string(),
                })
        })
        .collect()
}

fn key_text(values: &[&crate::model::CellValue]) -> String {
    let parts: Vec<String> = values.iter().map(|v| format!("`{v}`")).collect();
    format!("({})", parts.join(", "))
}
