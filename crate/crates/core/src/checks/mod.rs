//! Deterministic schema-driven checks and the finding type they produce.

mod finding;
mod registry;
mod rules;
mod validate;

pub use finding::{sort_findings, Dimension, Finding, Severity};
pub use registry::{check_ids, check_info, CheckInfo, CHECKS};
pub use rules::{BoundRule, Clause, CompareOp, ConsistencyRule, Literal, Predicate, RuleParseError};
pub(crate) use validate::row_list;
pub use validate::{
    bound_specs, cell_violations, check_ambiguity, check_atomicity, check_completeness, check_consistency,
    check_primary_key, check_referential_integrity, check_schema_binding, check_validity,
    completeness_for_column, validity_for_column, Violation, DEFAULT_ATOMIC_DELIMITERS,
};

use thiserror::Error;

use crate::model::ModelError;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CheckError {
    #[error("table `{table}` declares no primary key")]
    NoKeyDefined { table: String },
    #[error("table `{table}` has no column `{column}`")]
    MissingColumn { table: String, column: String },
    #[error("rule `{rule}` refers to unknown column `{column}`")]
    RuleBinding { rule: String, column: String },
    #[error("column `{column}` declares no foreign key")]
    NotForeignKey { column: String },
}

impl From<ModelError> for CheckError {
    fn from(e: ModelError) -> Self {
        match e {
            ModelError::MissingColumn { table, column } => CheckError::MissingColumn { table, column },
            other => CheckError::MissingColumn {
                table: String::new(),
                column: other.to_string(),
            },
        }
    }
}
