use std::collections::HashMap;

use super::{CheckError, ConsistencyRule, Finding};
use crate::model::{CellValue, ColumnSpec, FormatPattern, RangePosition, Schema, Table};

/// Default multi-value delimiters for the atomicity heuristic.
pub const DEFAULT_ATOMIC_DELIMITERS: [&str; 2] = [";", "|"];

/// Pairs each spec with its column index; specs with no matching column are skipped.
pub fn bound_specs<'s>(table: &Table, schema: &'s Schema) -> Vec<(usize, &'s ColumnSpec)> {
    schema
        .columns
        .iter()
        .filter_map(|spec| table.column_index(&spec.name).map(|i| (i, spec)))
        .collect()
}

/// Specs without a column and rules naming unknown columns.
pub fn check_schema_binding(table: &Table, schema: &Schema) -> Vec<Finding> {
    let mut out = Vec::new();
    for spec in &schema.columns {
        if table.column_index(&spec.name).is_none() {
            out.push(
                Finding::new(
                    table.name(),
                    "schema-binding",
                    format!("declared column `{}` is not in the table", spec.name),
                )
                .expected(spec.name.clone()),
            );
        }
    }
    for rule in &schema.rules {
        if let Err(column) = rule.bind(table) {
            out.push(rule_binding_finding(table, rule, &column));
        }
    }
    out
}

fn rule_binding_finding(table: &Table, rule: &ConsistencyRule, column: &str) -> Finding {
    Finding::new(
        table.name(),
        "rule-binding",
        format!("rule `{}` refers to unknown column `{column}`", rule.name),
    )
}

/// One finding per Null in a non-nullable column.
pub fn check_completeness(table: &Table, schema: &Schema) -> Vec<Finding> {
    bound_specs(table, schema)
        .into_iter()
        .flat_map(|(col, spec)| completeness_for_column(table, col, spec))
        .collect()
}

pub fn completeness_for_column(table: &Table, col: usize, spec: &ColumnSpec) -> Vec<Finding> {
    if spec.nullable {
        return Vec::new();
    }
    table.columns()[col]
        .cells
        .iter()
        .enumerate()
        .filter(|(_, c)| c.is_null())
        .map(|(row, _)| {
            Finding::new(
                table.name(),
                "not-null",
                format!("`{}` is empty but not nullable", spec.name),
            )
            .at(table.address(row, col))
        })
        .collect()
}

/// Type, range, restricted-value, size and format checks. Nulls are left
/// to [`check_completeness`].
pub fn check_validity(table: &Table, schema: &Schema) -> Vec<Finding> {
    bound_specs(table, schema)
        .into_iter()
        .flat_map(|(col, spec)| validity_for_column(table, col, spec))
        .collect()
}

pub fn validity_for_column(table: &Table, col: usize, spec: &ColumnSpec) -> Vec<Finding> {
    let mut out = Vec::new();
    for (row, cell) in table.columns()[col].non_null() {
        for violation in cell_violations(spec, cell) {
            out.push(violation.into_finding(table, row, col, spec, cell));
        }
    }
    out
}

/// A single way a non-null cell breaks its spec.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    Type,
    Format,
    Range(RangePosition),
    Values,
    Size(usize),
}

impl Violation {
    pub fn check_id(&self) -> &'static str {
        match self {
            Violation::Type => "type",
            Violation::Format => "format",
            Violation::Range(_) => "range",
            Violation::Values => "values",
            Violation::Size(_) => "size",
        }
    }

    fn into_finding(
        self,
        table: &Table,
        row: usize,
        col: usize,
        spec: &ColumnSpec,
        cell: &CellValue,
    ) -> Finding {
        let (message, expected) = match &self {
            Violation::Type => (
                format!("value {cell} is not a {}", spec.data_type),
                spec.data_type.to_string(),
            ),
            Violation::Format => {
                let fmt = spec.format.as_ref().map_or("", FormatPattern::source);
                (
                    format!("value {cell} does not match format {fmt}"),
                    fmt.to_string(),
                )
            }
            Violation::Range(pos) => {
                let range = spec.range.as_ref().expect("range violation without range");
                let msg = match pos {
                    RangePosition::Below => format!("value {cell} below min {}", range.min),
                    _ => format!("value {cell} above max {}", range.max),
                };
                (msg, range.to_string())
            }
            Violation::Values => {
                let list = spec
                    .restricted_values
                    .iter()
                    .flatten()
                    .map(ToString::to_string)
                    .collect::<Vec<_>>()
                    .join("|");
                (format!("value {cell} not in {{{list}}}"), list)
            }
            Violation::Size(len) => {
                let max = spec.max_size.unwrap_or_default();
                (
                    format!("length {len} exceeds size {max}"),
                    format!("at most {max} characters"),
                )
            }
        };
        Finding::new(table.name(), self.check_id(), message)
            .at(table.address(row, col))
            .observed(cell.clone())
            .expected(expected)
    }
}

/// Every clause of `spec` the non-null `cell` violates. A cell of the wrong
/// variant yields only a type (or, for unparseable text under a declared
/// format, a format) violation.
pub fn cell_violations(spec: &ColumnSpec, cell: &CellValue) -> Vec<Violation> {
    let mut out = Vec::new();
    if cell.is_null() {
        return out;
    }
    if cell.data_type() != Some(spec.data_type) {
        match (&spec.format, cell) {
            (Some(fmt), CellValue::Text(s)) if !fmt.matches(s) => out.push(Violation::Format),
            _ => out.push(Violation::Type),
        }
        return out;
    }
    if let Some(range) = &spec.range {
        match range.position(cell) {
            Some(RangePosition::Inside) | None => {}
            Some(pos) => out.push(Violation::Range(pos)),
        }
    }
    if !spec.allows_value(cell) {
        out.push(Violation::Values);
    }
    if let (Some(max), CellValue::Text(s)) = (spec.max_size, cell) {
        let len = s.chars().count();
        if len > max {
            out.push(Violation::Size(len));
        }
    }
    if let Some(fmt) = &spec.format {
        let ok = match cell {
            CellValue::Date(_) => true,
            CellValue::Text(s) => fmt.matches(s),
            other => fmt.is_date() || fmt.matches(&other.to_string()),
        };
        if !ok {
            out.push(Violation::Format);
        }
    }
    out
}

/// Duplicate primary keys (one finding per group) and Nulls inside key columns.
pub fn check_primary_key(table: &Table, schema: &Schema) -> Result<Vec<Finding>, CheckError> {
    let key_specs: Vec<&ColumnSpec> = schema.primary_key();
    if key_specs.is_empty() {
        return Err(CheckError::NoKeyDefined {
            table: table.name().to_string(),
        });
    }
    let key_cols = table
        .resolve_columns(&key_specs.iter().map(|s| s.name.as_str()).collect::<Vec<_>>())
        .map_err(CheckError::from)?;
    let mut out = Vec::new();
    let mut groups: HashMap<Vec<&CellValue>, Vec<usize>> = HashMap::new();
    for row in 0..table.row_count() {
        let key: Vec<&CellValue> = key_cols.iter().map(|&c| table.cell(row, c)).collect();
        let mut has_null = false;
        for (&c, cell) in key_cols.iter().zip(&key) {
            if cell.is_null() {
                has_null = true;
                out.push(
                    Finding::new(
                        table.name(),
                        "key-null",
                        format!("primary key column `{}` is empty", table.columns()[c].name),
                    )
                    .at(table.address(row, c)),
                );
            }
        }
        if !has_null {
            groups.entry(key).or_default().push(row);
        }
    }
    let mut dup_groups: Vec<(Vec<&CellValue>, Vec<usize>)> =
        groups.into_iter().filter(|(_, rows)| rows.len() > 1).collect();
    dup_groups.sort_by_key(|(_, rows)| rows[0]);
    for (key, rows) in dup_groups {
        let key_text = key.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(", ");
        let addresses = rows
            .iter()
            .flat_map(|&r| key_cols.iter().map(move |&c| (r, c)))
            .map(|(r, c)| table.address(r, c));
        out.push(
            Finding::new(
                table.name(),
                "primary-key",
                format!(
                    "key ({key_text}) appears in {} rows: {}",
                    rows.len(),
                    row_list(&rows)
                ),
            )
            .at_all(addresses)
            .observed(key[0].clone()),
        );
    }
    Ok(out)
}

pub(crate) fn row_list(rows: &[usize]) -> String {
    const SHOWN: usize = 10;
    let mut s = rows
        .iter()
        .take(SHOWN)
        .map(|r| (r + 1).to_string())
        .collect::<Vec<_>>()
        .join(", ");
    if rows.len() > SHOWN {
        s.push_str(&format!(", ... ({} more)", rows.len() - SHOWN));
    }
    s
}

/// Child foreign-key values that are absent from the parent key column.
/// Null children are skipped; non-nullable Nulls belong to completeness.
pub fn check_referential_integrity(
    child: &Table,
    parent: &Table,
    fk: &ColumnSpec,
) -> Result<Vec<Finding>, CheckError> {
    let target = fk.foreign_key.as_ref().ok_or_else(|| CheckError::NotForeignKey {
        column: fk.name.clone(),
    })?;
    let child_col = child.resolve_columns(&[fk.name.as_str()])?[0];
    let parent_col = parent.resolve_columns(&[target.column.as_str()])?[0];
    let keys: std::collections::HashSet<&CellValue> = parent.columns()[parent_col]
        .cells
        .iter()
        .filter(|c| !c.is_null())
        .collect();
    Ok(child.columns()[child_col]
        .non_null()
        .filter(|(_, v)| !keys.contains(v))
        .map(|(row, v)| {
            Finding::new(
                child.name(),
                "foreign-key",
                format!("value {v} not found in {target}"),
            )
            .at(child.address(row, child_col))
            .observed(v.clone())
            .expected(format!("a key of {target}"))
        })
        .collect())
}

/// One finding per row where a rule's `when` holds but its `expect` fails.
pub fn check_consistency(table: &Table, rules: &[ConsistencyRule]) -> Result<Vec<Finding>, CheckError> {
    let bound = rules
        .iter()
        .map(|r| {
            r.bind(table).map_err(|column| CheckError::RuleBinding {
                rule: r.name.clone(),
                column,
            })
        })
        .collect::<Result<Vec<_>, _>>()?;
    let mut out = Vec::new();
    for rule in &bound {
        let cited = rule.cited_columns();
        for row in 0..table.row_count() {
            if !rule.when_holds(table, row) {
                continue;
            }
            let failed = rule.failed_expectations(table, row);
            let Some(&first_failed) = failed.first() else {
                continue;
            };
            let shown = cited
                .iter()
                .map(|&c| format!("{}={}", table.columns()[c].name, table.cell(row, c)))
                .collect::<Vec<_>>()
                .join(", ");
            out.push(
                Finding::new(
                    table.name(),
                    "consistency",
                    format!("rule `{}` violated ({shown})", rule.rule.name),
                )
                .at_all(cited.iter().map(|&c| table.address(row, c)))
                .observed(table.cell(row, first_failed).clone())
                .expected(rule.rule.expect.to_string()),
            );
        }
    }
    Ok(out)
}

/// Text cells that contain one of the multi-value delimiters.
pub fn check_atomicity(table: &Table, delimiters: &[&str]) -> Vec<Finding> {
    let mut out = Vec::new();
    for (col, column) in table.columns().iter().enumerate() {
        for (row, cell) in column.cells.iter().enumerate() {
            let CellValue::Text(s) = cell else { continue };
            if let Some(d) = delimiters.iter().find(|d| !d.is_empty() && s.contains(**d)) {
                out.push(
                    Finding::new(
                        table.name(),
                        "atomicity",
                        format!("`{}` may hold several values (contains `{d}`)", column.name),
                    )
                    .at(table.address(row, col))
                    .observed(cell.clone()),
                );
            }
        }
    }
    out
}

/// Header names that clash after trimming and case folding.
pub fn check_ambiguity(table: &Table) -> Vec<Finding> {
    let mut groups: Vec<(String, Vec<u32>)> = Vec::new();
    for (i, name) in table.headers().enumerate() {
        let key = name.trim().to_lowercase();
        match groups.iter_mut().find(|(k, _)| *k == key) {
            Some((_, cols)) => cols.push(i as u32 + 1),
            None => groups.push((key, vec![i as u32 + 1])),
        }
    }
    groups
        .into_iter()
        .filter(|(_, cols)| cols.len() > 1)
        .map(|(key, cols)| {
            let names = cols
                .iter()
                .map(|&c| format!("`{}`", table.columns()[c as usize - 1].name))
                .collect::<Vec<_>>()
                .join(", ");
            Finding::new(
                table.name(),
                "ambiguity",
                format!("{} columns share the name `{key}`: {names}", cols.len()),
            )
            .on_columns(cols)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{DataType, Table};
    use rust_decimal_macros::dec;

    fn one_col(name: &str, cells: Vec<CellValue>) -> Table {
        Table::from_rows("t", [name], cells.into_iter().map(|c| vec![c]).collect()).unwrap()
    }

    fn rows_of(findings: &[Finding]) -> Vec<u32> {
        findings.iter().map(|f| f.addresses[0].row).collect()
    }

    #[test]
    fn completeness_flags_nulls_in_required_columns() {
        let t = one_col("x", vec![1.into(), CellValue::Null, 3.into()]);
        let schema = Schema::new("t").with_column(ColumnSpec::new("x", DataType::Number).required());
        let f = check_completeness(&t, &schema);
        assert_eq!(rows_of(&f), [2]);
        assert_eq!(f[0].dimension, super::super::Dimension::Complete);
    }

    #[test]
    fn completeness_permits_nullable() {
        let t = one_col("x", vec![CellValue::Null, CellValue::Null]);
        let schema = Schema::new("t").with_column(ColumnSpec::new("x", DataType::Number));
        assert!(check_completeness(&t, &schema).is_empty());
    }

    #[test]
    fn range_boundaries() {
        let t = one_col("x", vec![5.into(), 101.into(), (-3).into()]);
        let schema = Schema::new("t")
            .with_column(ColumnSpec::new("x", DataType::Number).with_range(dec!(0), dec!(100)));
        let f = check_validity(&t, &schema);
        assert_eq!(rows_of(&f), [2, 3]);
        assert_eq!(f[0].message, "value 101 above max 100");
        assert_eq!(f[1].message, "value -3 below min 0");
    }

    #[test]
    fn restricted_values() {
        let t = one_col("g", vec!["M".into(), "X".into()]);
        let schema =
            Schema::new("t").with_column(ColumnSpec::new("g", DataType::Text).with_values(["M", "F"]));
        let f = check_validity(&t, &schema);
        assert_eq!(rows_of(&f), [2]);
        assert_eq!(f[0].check_id, "values");
    }

    #[test]
    fn date_format_mismatch_is_conformity() {
        let t = one_col("d", vec!["01/01/2020".into()]);
        let schema =
            Schema::new("t").with_column(ColumnSpec::new("d", DataType::Date).with_format("YYYY-MM-DD"));
        let f = check_validity(&t, &schema);
        assert_eq!(f.len(), 1);
        assert_eq!(f[0].check_id, "format");
        assert_eq!(f[0].dimension, super::super::Dimension::Conformity);
    }

    #[test]
    fn size_and_type() {
        let t = one_col("s", vec!["abcdef".into(), 7.into(), "ok".into()]);
        let schema = Schema::new("t").with_column(ColumnSpec::new("s", DataType::Text).with_max_size(4));
        let f = check_validity(&t, &schema);
        let ids: Vec<_> = f.iter().map(|f| f.check_id.as_str()).collect();
        assert_eq!(ids, ["size", "type"]);
    }

    #[test]
    fn nulls_never_hit_validity() {
        let t = one_col("x", vec![CellValue::Null]);
        let schema = Schema::new("t").with_column(
            ColumnSpec::new("x", DataType::Number)
                .required()
                .with_range(dec!(1), dec!(2))
                .with_values([dec!(1)]),
        );
        assert!(check_validity(&t, &schema).is_empty());
    }

    #[test]
    fn duplicate_key_pair() {
        let t = one_col("k", vec!["A".into(), "B".into(), "A".into()]);
        let schema = Schema::new("t").with_column(ColumnSpec::new("k", DataType::Text).primary_key());
        let f = check_primary_key(&t, &schema).unwrap();
        assert_eq!(f.len(), 1);
        assert_eq!(f[0].addresses.iter().map(|a| a.row).collect::<Vec<_>>(), [1, 3]);
    }

    #[test]
    fn unique_keys_and_missing_key() {
        let t = one_col("k", vec!["A".into(), "B".into(), "C".into()]);
        let schema = Schema::new("t").with_column(ColumnSpec::new("k", DataType::Text).primary_key());
        assert!(check_primary_key(&t, &schema).unwrap().is_empty());
        let no_key = Schema::new("t").with_column(ColumnSpec::new("k", DataType::Text));
        assert!(matches!(
            check_primary_key(&t, &no_key),
            Err(CheckError::NoKeyDefined { .. })
        ));
    }

    #[test]
    fn null_keys_reported_not_grouped() {
        let t = one_col("k", vec![CellValue::Null, CellValue::Null]);
        let schema = Schema::new("t").with_column(ColumnSpec::new("k", DataType::Text).primary_key());
        let f = check_primary_key(&t, &schema).unwrap();
        assert_eq!(f.iter().filter(|f| f.check_id == "key-null").count(), 2);
        assert!(f.iter().all(|f| f.check_id != "primary-key"));
    }

    #[test]
    fn foreign_key_set_difference() {
        let child = one_col("pid", vec![1.into(), 2.into(), 5.into(), CellValue::Null]);
        let parent =
            Table::from_rows("p", ["id"], vec![vec![1.into()], vec![2.into()], vec![3.into()]]).unwrap();
        let fk = ColumnSpec::new("pid", DataType::Number).with_foreign_key("p", "id");
        let f = check_referential_integrity(&child, &parent, &fk).unwrap();
        assert_eq!(rows_of(&f), [3]);
        let sub = one_col("pid", vec![1.into(), 3.into()]);
        assert!(check_referential_integrity(&sub, &parent, &fk)
            .unwrap()
            .is_empty());
        let bad = ColumnSpec::new("pid", DataType::Number).with_foreign_key("p", "nope");
        assert!(matches!(
            check_referential_integrity(&child, &parent, &bad),
            Err(CheckError::MissingColumn { .. })
        ));
    }

    #[test]
    fn consistency_john_gender() {
        let t = Table::from_rows(
            "people",
            ["first_name", "gender"],
            vec![
                vec!["John".into(), "F".into()],
                vec!["John".into(), "M".into()],
                vec!["Mary".into(), "F".into()],
            ],
        )
        .unwrap();
        let rule =
            ConsistencyRule::parse("john_male", r#"when first_name in {John} expect gender = "M""#).unwrap();
        let f = check_consistency(&t, &[rule]).unwrap();
        assert_eq!(f.len(), 1);
        assert_eq!(f[0].addresses.len(), 2);
        assert_eq!(f[0].addresses[0].row, 1);
        assert_eq!(f[0].dimension, super::super::Dimension::Consistent);
        let unknown = ConsistencyRule::parse("x", "when nope = 1 expect gender = M").unwrap();
        assert!(matches!(
            check_consistency(&t, &[unknown]),
            Err(CheckError::RuleBinding { .. })
        ));
    }

    #[test]
    fn atomicity_heuristic() {
        let t = one_col(
            "c",
            vec!["red;blue".into(), "red, white and blue".into(), 5.into()],
        );
        let f = check_atomicity(&t, &DEFAULT_ATOMIC_DELIMITERS);
        assert_eq!(rows_of(&f), [1]);
        assert_eq!(f[0].severity, super::super::Severity::Warning);
    }

    #[test]
    fn ambiguity_groups() {
        let t = Table::from_rows::<&str>("t", ["amount", "Amount "], vec![]).unwrap();
        assert_eq!(check_ambiguity(&t).len(), 1);
        let t = Table::from_rows::<&str>("t", ["a", "b", "c"], vec![]).unwrap();
        assert!(check_ambiguity(&t).is_empty());
        let t = Table::from_rows::<&str>("t", ["x", "x", "x"], vec![]).unwrap();
        let f = check_ambiguity(&t);
        assert_eq!(f.len(), 1);
        assert_eq!(f[0].columns, [1, 2, 3]);
    }

    #[test]
    fn unbound_spec_and_rule() {
        let t = one_col("x", vec![1.into()]);
        let schema = Schema::new("t")
            .with_column(ColumnSpec::new("y", DataType::Number))
            .with_rule(ConsistencyRule::parse("r", "when z = 1 expect x = 2").unwrap());
        let f = check_schema_binding(&t, &schema);
        let ids: Vec<_> = f.iter().map(|f| f.check_id.as_str()).collect();
        assert_eq!(ids, ["schema-binding", "rule-binding"]);
    }
}
