//! The full check suite over one table.

use std::collections::BTreeSet;

use rayon::prelude::*;
use rust_decimal::Decimal;
use thiserror::Error;

use crate::analytics::{
    benford, benford_finding, dominance, duplicate_findings, find_duplicates, find_gaps, gap_findings,
    outlier_findings, suspicious_in_column, SuspiciousPatterns,
};
use crate::checks::{
    check_ambiguity, check_atomicity, check_consistency, check_ids, check_info, check_primary_key,
    check_referential_integrity, check_schema_binding, completeness_for_column, sort_findings,
    validity_for_column, Finding, DEFAULT_ATOMIC_DELIMITERS,
};
use crate::model::{CellValue, Column, ColumnSpec, DataType, Schema, Table};

#[derive(Debug, Error)]
pub enum AuditError {
    #[error("unknown check `{0}`")]
    UnknownCheck(String),
    #[error("invalid threshold: {0}")]
    BadThreshold(String),
    #[error("cannot start worker threads: {0}")]
    Threads(String),
}

#[derive(Debug, Clone)]
pub struct AuditConfig {
    /// Check ids to run; the default is every registered check.
    pub enabled: BTreeSet<String>,
    pub benford_min_sample: usize,
    pub dominance_threshold: f64,
    pub outlier_k: Decimal,
    pub atomic_delimiters: Vec<String>,
    pub suspicious: SuspiciousPatterns,
    /// Worker threads; 0 uses one per core.
    pub threads: usize,
}

impl Default for AuditConfig {
    fn default() -> Self {
        Self {
            enabled: check_ids().map(str::to_string).collect(),
            benford_min_sample: 100,
            dominance_threshold: 0.5,
            outlier_k: Decimal::new(15, 1),
            atomic_delimiters: DEFAULT_ATOMIC_DELIMITERS.iter().map(|s| s.to_string()).collect(),
            suspicious: SuspiciousPatterns::default(),
            threads: 0,
        }
    }
}

impl AuditConfig {
    /// Restricts the suite to `ids`, rejecting unregistered names.
    pub fn with_checks<S: AsRef<str>>(mut self, ids: &[S]) -> Result<Self, AuditError> {
        self.enabled = BTreeSet::new();
        for id in ids {
            let id = id.as_ref().trim();
            if check_info(id).is_none() {
                return Err(AuditError::UnknownCheck(id.to_string()));
            }
            self.enabled.insert(id.to_string());
        }
        Ok(self)
    }

    /// Removes checks from the suite, rejecting unregistered names.
    pub fn without_checks<S: AsRef<str>>(mut self, ids: &[S]) -> Result<Self, AuditError> {
        for id in ids {
            let id = id.as_ref().trim();
            if check_info(id).is_none() {
                return Err(AuditError::UnknownCheck(id.to_string()));
            }
            self.enabled.remove(id);
        }
        Ok(self)
    }

    pub fn validate(&self) -> Result<(), AuditError> {
        if !(self.dominance_threshold > 0.0 && self.dominance_threshold <= 1.0) {
            return Err(AuditError::BadThreshold(format!(
                "dominance threshold must be in (0, 1], got {}",
                self.dominance_threshold
            )));
        }
        if self.outlier_k <= Decimal::ZERO {
            return Err(AuditError::BadThreshold(format!(
                "outlier k must be positive, got {}",
                self.outlier_k
            )));
        }
        if self.benford_min_sample == 0 {
            return Err(AuditError::BadThreshold(
                "benford minimum sample must be positive".into(),
            ));
        }
        Ok(())
    }

    fn any(&self, ids: &[&str]) -> bool {
        ids.iter().any(|id| self.enabled.contains(*id))
    }
}

enum Job<'a> {
    Binding,
    PrimaryKey,
    ForeignKey(&'a ColumnSpec),
    Consistency,
    Atomicity,
    Ambiguity,
    Duplicates,
    Column(usize, Option<&'a ColumnSpec>),
}

/// Runs every enabled check against `table`. `related` supplies parent
/// tables for foreign keys, matched by name; a key whose parent is missing
/// is reported as a schema-binding error. Findings come back in canonical
/// order, identical for any thread count.
pub fn audit_table(
    table: &Table,
    schema: &Schema,
    related: &[&Table],
    config: &AuditConfig,
) -> Result<Vec<Finding>, AuditError> {
    config.validate()?;
    let mut jobs = vec![
        Job::Binding,
        Job::Consistency,
        Job::Atomicity,
        Job::Ambiguity,
        Job::Duplicates,
    ];
    if !schema.primary_key().is_empty() {
        jobs.push(Job::PrimaryKey);
    }
    for spec in &schema.columns {
        if spec.foreign_key.is_some() && table.column_index(&spec.name).is_some() {
            jobs.push(Job::ForeignKey(spec));
        }
    }
    for (col, column) in table.columns().iter().enumerate() {
        jobs.push(Job::Column(col, schema.spec(&column.name)));
    }
    let run = || -> Vec<Finding> {
        jobs.par_iter()
            .flat_map_iter(|job| run_job(job, table, schema, related, config))
            .collect()
    };
    let mut findings = if config.threads == 0 {
        run()
    } else {
        rayon::ThreadPoolBuilder::new()
            .num_threads(config.threads)
            .build()
            .map_err(|e| AuditError::Threads(e.to_string()))?
            .install(run)
    };
    findings.retain(|f| config.enabled.contains(&f.check_id));
    for f in &mut findings {
        if let Some(sev) = schema.severity_overrides.get(&f.check_id) {
            f.severity = *sev;
        }
    }
    sort_findings(&mut findings);
    Ok(findings)
}

fn run_job(
    job: &Job,
    table: &Table,
    schema: &Schema,
    related: &[&Table],
    config: &AuditConfig,
) -> Vec<Finding> {
    match job {
        Job::Binding if config.any(&["schema-binding", "rule-binding"]) => {
            check_schema_binding(table, schema)
        }
        Job::PrimaryKey if config.any(&["primary-key", "key-null"]) => {
            check_primary_key(table, schema).unwrap_or_else(|e| vec![binding_error(table, e.to_string())])
        }
        Job::ForeignKey(spec) if config.any(&["foreign-key"]) => {
            let target = spec
                .foreign_key
                .as_ref()
                .expect("job only built for foreign keys");
            let parent = if target.table == table.name() {
                Some(table)
            } else {
                related.iter().copied().find(|t| t.name() == target.table)
            };
            match parent {
                None => vec![binding_error(
                    table,
                    format!("`{}` refers to missing table `{}`", spec.name, target.table),
                )],
                Some(parent) => check_referential_integrity(table, parent, spec)
                    .unwrap_or_else(|e| vec![binding_error(table, e.to_string())]),
            }
        }
        Job::Consistency if config.any(&["consistency"]) => {
            // Rules with unknown columns are reported by the binding check.
            let usable: Vec<_> = schema
                .rules
                .iter()
                .filter(|r| r.bind(table).is_ok())
                .cloned()
                .collect();
            check_consistency(table, &usable).unwrap_or_default()
        }
        Job::Atomicity if config.any(&["atomicity"]) => {
            let delims: Vec<&str> = config.atomic_delimiters.iter().map(String::as_str).collect();
            check_atomicity(table, &delims)
        }
        Job::Ambiguity if config.any(&["ambiguity"]) => check_ambiguity(table),
        Job::Duplicates if config.any(&["duplicate-row"]) => {
            let all: [&str; 0] = [];
            find_duplicates(table, &all)
                .map(|r| duplicate_findings(table, &r))
                .unwrap_or_default()
        }
        Job::Column(col, spec) => column_checks(table, *col, *spec, schema, config),
        _ => Vec::new(),
    }
}

fn binding_error(table: &Table, message: String) -> Finding {
    Finding::new(table.name(), "schema-binding", message)
}

/// The column's Numbers only, other cells blanked so row indices hold.
fn numbers_only(column: &Column) -> std::borrow::Cow<'_, Column> {
    let clean = column
        .cells
        .iter()
        .all(|c| matches!(c, CellValue::Null | CellValue::Number(_)));
    if clean {
        std::borrow::Cow::Borrowed(column)
    } else {
        std::borrow::Cow::Owned(Column::new(
            column.name.clone(),
            column
                .cells
                .iter()
                .map(|c| {
                    if matches!(c, CellValue::Number(_)) {
                        c.clone()
                    } else {
                        CellValue::Null
                    }
                })
                .collect(),
        ))
    }
}

fn column_checks(
    table: &Table,
    col: usize,
    spec: Option<&ColumnSpec>,
    schema: &Schema,
    config: &AuditConfig,
) -> Vec<Finding> {
    let column = &table.columns()[col];
    let mut out = Vec::new();
    if let Some(spec) = spec {
        if config.any(&["not-null"]) {
            out.extend(completeness_for_column(table, col, spec));
        }
        if config.any(&["type", "format", "range", "values", "size"]) {
            out.extend(validity_for_column(table, col, spec));
        }
    }
    if config.any(&["suspicious"]) {
        out.extend(suspicious_in_column(table, col, Some(schema), &config.suspicious));
    }
    if config.any(&["dominance"]) {
        let restricted = spec.and_then(|s| s.restricted_values.as_deref());
        if let Some(d) = dominance(column, config.dominance_threshold, restricted) {
            out.push(d.to_finding(table, col));
        }
    }
    let numeric = match spec {
        Some(s) => s.data_type == DataType::Number,
        None => {
            column.non_null().next().is_some()
                && column.non_null().all(|(_, c)| matches!(c, CellValue::Number(_)))
        }
    };
    if numeric && config.any(&["outlier"]) {
        let numbers = numbers_only(column);
        let view = if let std::borrow::Cow::Owned(c) = &numbers {
            replace_column(table, col, c.clone())
        } else {
            None
        };
        let t = view.as_ref().unwrap_or(table);
        let range = spec
            .and_then(|s| s.range.as_ref())
            .filter(|_| config.any(&["range"]));
        out.extend(
            outlier_findings(t, col, config.outlier_k)
                .unwrap_or_default()
                .into_iter()
                .filter(|f| match (range, f.addresses.first()) {
                    (Some(r), Some(a)) => r.contains(table.cell(a.row as usize - 1, col)),
                    _ => true,
                }),
        );
    }
    if let Some(spec) = spec {
        if let Some(step) = spec.sequence_step {
            if config.any(&["gap", "irregular-step"]) {
                if let Ok(report) = find_gaps(column, step) {
                    out.extend(gap_findings(table, col, &report));
                }
            }
        }
        if spec.benford && config.any(&["benford"]) {
            if let Ok(result) = benford(&numbers_only(column), config.benford_min_sample) {
                out.extend(benford_finding(table, col, &result));
            }
        }
    }
    out
}

/// A copy of `table` with one column swapped, used only when a column has
/// stray non-numeric cells.
fn replace_column(table: &Table, col: usize, column: Column) -> Option<Table> {
    let mut columns = table.columns().to_vec();
    columns[col] = column;
    Table::new(table.name(), columns).ok()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::checks::{ConsistencyRule, Dimension, Severity};

    fn people() -> (Table, Schema) {
        let t = Table::from_rows(
            "people",
            ["id", "first_name", "gender", "age"],
            vec![
                vec![1.into(), "Mary".into(), "F".into(), 34.into()],
                vec![2.into(), "John".into(), "F".into(), 41.into()],
                vec![3.into(), "John".into(), "M".into(), 150.into()],
                vec![3.into(), "Ann".into(), CellValue::Null, 29.into()],
            ],
        )
        .unwrap();
        let schema = Schema::new("people")
            .with_column(ColumnSpec::new("id", DataType::Number).primary_key())
            .with_column(ColumnSpec::new("first_name", DataType::Text))
            .with_column(
                ColumnSpec::new("gender", DataType::Text)
                    .required()
                    .with_values(["F", "M"]),
            )
            .with_column(ColumnSpec::new("age", DataType::Number).with_range(0, 120))
            .with_rule(
                ConsistencyRule::parse("john-is-male", "when first_name = John expect gender = M").unwrap(),
            );
        (t, schema)
    }

    #[test]
    fn suite_runs_and_is_thread_independent() {
        let (t, schema) = people();
        let one = audit_table(
            &t,
            &schema,
            &[],
            &AuditConfig {
                threads: 1,
                ..Default::default()
            },
        )
        .unwrap();
        let four = audit_table(
            &t,
            &schema,
            &[],
            &AuditConfig {
                threads: 4,
                ..Default::default()
            },
        )
        .unwrap();
        assert_eq!(one, four);
        let ids: BTreeSet<&str> = one.iter().map(|f| f.check_id.as_str()).collect();
        assert_eq!(
            ids,
            BTreeSet::from(["consistency", "not-null", "primary-key", "range"])
        );
        let without_range = audit_table(
            &t,
            &schema,
            &[],
            &AuditConfig::default().without_checks(&["range"]).unwrap(),
        )
        .unwrap();
        assert!(without_range.iter().any(|f| f.check_id == "outlier"));
        let consistent: Vec<_> = one
            .iter()
            .filter(|f| f.dimension == Dimension::Consistent)
            .collect();
        assert_eq!(consistent.len(), 1);
    }

    #[test]
    fn enabled_subset_and_overrides() {
        let (t, mut schema) = people();
        schema
            .severity_overrides
            .insert("range".into(), Severity::Warning);
        let cfg = AuditConfig::default().with_checks(&["range"]).unwrap();
        let f = audit_table(&t, &schema, &[], &cfg).unwrap();
        assert_eq!(f.len(), 1);
        assert_eq!(f[0].severity, Severity::Warning);
        assert!(AuditConfig::default().with_checks(&["spelling"]).is_err());
    }

    #[test]
    fn missing_parent_is_reported() {
        let t = Table::from_rows("orders", ["cust"], vec![vec![1.into()]]).unwrap();
        let schema = Schema::new("orders")
            .with_column(ColumnSpec::new("cust", DataType::Number).with_foreign_key("customers", "id"));
        let f = audit_table(&t, &schema, &[], &AuditConfig::default()).unwrap();
        assert_eq!(f[0].check_id, "schema-binding");
        let parent = Table::from_rows("customers", ["id"], vec![vec![2.into()]]).unwrap();
        let f = audit_table(&t, &schema, &[&parent], &AuditConfig::default()).unwrap();
        assert_eq!(f[0].check_id, "foreign-key");
    }
}
