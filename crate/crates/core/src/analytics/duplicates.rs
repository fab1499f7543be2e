use std::collections::HashMap;

use rust_decimal::Decimal;

use super::AnalyticsError;
use crate::checks::{row_list, Finding};
use crate::model::{CellValue, Column, DateValue, Table};

/// Rows that repeat on the chosen key columns.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DuplicateReport {
    /// Per row (0-based), how many rows share its key, itself included.
    pub counts: Vec<usize>,
    /// Groups of two or more 0-based rows, ordered by their first row.
    pub groups: Vec<Vec<usize>>,
    pub key_columns: Vec<usize>,
}

/// Groups rows equal on `key_columns`, or on every column when the list is
/// empty. Nulls compare equal to each other; numbers compare by value.
pub fn find_duplicates(
    table: &Table,
    key_columns: &[impl AsRef<str>],
) -> Result<DuplicateReport, AnalyticsError> {
    let key_columns: Vec<usize> = if key_columns.is_empty() {
        (0..table.column_count()).collect()
    } else {
        key_columns
            .iter()
            .map(|name| {
                table
                    .column_index(name.as_ref())
                    .ok_or_else(|| AnalyticsError::MissingColumn {
                        table: table.name().to_string(),
                        column: name.as_ref().to_string(),
                    })
            })
            .collect::<Result<_, _>>()?
    };
    let mut index: HashMap<Vec<&CellValue>, usize> = HashMap::new();
    let mut groups: Vec<Vec<usize>> = Vec::new();
    let mut group_of = Vec::with_capacity(table.row_count());
    for row in 0..table.row_count() {
        let key: Vec<&CellValue> = key_columns.iter().map(|&c| table.cell(row, c)).collect();
        let g = *index.entry(key).or_insert_with(|| {
            groups.push(Vec::new());
            groups.len() - 1
        });
        groups[g].push(row);
        group_of.push(g);
    }
    let counts = group_of.iter().map(|&g| groups[g].len()).collect();
    groups.retain(|g| g.len() > 1);
    Ok(DuplicateReport {
        counts,
        groups,
        key_columns,
    })
}

/// One duplicate-row finding per group, addressing the key cells of every row.
pub fn duplicate_findings(table: &Table, report: &DuplicateReport) -> Vec<Finding> {
    report
        .groups
        .iter()
        .map(|rows| {
            Finding::new(
                table.name(),
                "duplicate-row",
                format!("rows {} are duplicates ({} copies)", row_list(rows), rows.len()),
            )
            .at_all(
                rows.iter()
                    .flat_map(|&r| report.key_columns.iter().map(move |&c| table.address(r, c))),
            )
        })
        .collect()
}

/// Classification of one adjacent pair of sorted values.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StepClass {
    Duplicate,
    Sequential,
    Gap(u64),
    Irregular,
}

/// Classifies a difference `d ≥ 0` against a positive step.
pub fn classify_step(d: Decimal, step: Decimal) -> StepClass {
    if d.is_zero() {
        return StepClass::Duplicate;
    }
    if d == step {
        return StepClass::Sequential;
    }
    if d < step {
        return StepClass::Irregular;
    }
    match d.checked_div(step) {
        Some(ratio) if ratio.fract().is_zero() => {
            use num_traits::ToPrimitive;
            ratio
                .to_u64()
                .map_or(StepClass::Irregular, |r| StepClass::Gap(r - 1))
        }
        _ => StepClass::Irregular,
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Gap {
    pub after: CellValue,
    pub before: CellValue,
    /// 0-based row of `after`.
    pub row: usize,
    pub missing: u64,
}

impl Gap {
    /// The values the sequence skips, `after + step·i` for `i` in `1..=missing`.
    pub fn missing_values(&self, step: Decimal) -> Vec<CellValue> {
        (1..=self.missing)
            .filter_map(|i| offset(&self.after, step * Decimal::from(i)))
            .collect()
    }
}

fn offset(value: &CellValue, by: Decimal) -> Option<CellValue> {
    match value {
        CellValue::Number(d) => d.checked_add(by).map(CellValue::Number),
        CellValue::Date(dv) => {
            use num_traits::ToPrimitive;
            let secs = (by * Decimal::from(86_400)).to_i64()?;
            let base = dv.date.and_time(dv.time.unwrap_or_default());
            let moved = base.checked_add_signed(chrono::Duration::seconds(secs))?;
            Some(CellValue::Date(match dv.time {
                None => DateValue::date(moved.date()),
                Some(_) => DateValue::with_time(moved.date(), moved.time()),
            }))
        }
        _ => None,
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct IrregularStep {
    pub after: CellValue,
    pub before: CellValue,
    pub row: usize,
    pub difference: Decimal,
}

/// Result of sorting a column and classifying successive differences.
///
/// Every adjacent sorted pair lands in exactly one class, so
/// `duplicate_pairs + sequential_runs + gaps.len() + irregular.len()`
/// is the non-Null count minus one.
#[derive(Debug, Clone, PartialEq)]
pub struct GapReport {
    pub step: Decimal,
    /// Repeated values with every 0-based row holding them.
    pub duplicates: Vec<(CellValue, Vec<usize>)>,
    pub gaps: Vec<Gap>,
    pub irregular: Vec<IrregularStep>,
    /// Adjacent pairs exactly one step apart.
    pub sequential_runs: usize,
    /// Adjacent pairs with difference 0.
    pub duplicate_pairs: usize,
}

impl GapReport {
    pub fn missing_count(&self) -> u64 {
        self.gaps.iter().map(|g| g.missing).sum()
    }

    pub fn pair_count(&self) -> usize {
        self.duplicate_pairs + self.sequential_runs + self.gaps.len() + self.irregular.len()
    }
}

/// Sorts the non-Null values and classifies each successive difference.
/// Dates are measured in days, so `step = 7` expects weekly dates.
pub fn find_gaps(column: &Column, step: Decimal) -> Result<GapReport, AnalyticsError> {
    if step <= Decimal::ZERO {
        return Err(AnalyticsError::BadParameter(format!(
            "step must be positive, got {step}"
        )));
    }
    let non_orderable = || AnalyticsError::NonOrderable {
        column: column.name.clone(),
    };
    let mut keyed: Vec<(Decimal, usize)> = Vec::new();
    let mut kind = None;
    for (row, cell) in column.non_null() {
        let key = match cell {
            CellValue::Number(d) => *d,
            CellValue::Date(dv) => Decimal::from(dv.seconds()) / Decimal::from(86_400),
            _ => return Err(non_orderable()),
        };
        let this = std::mem::discriminant(cell);
        if *kind.get_or_insert(this) != this {
            return Err(non_orderable());
        }
        keyed.push((key, row));
    }
    keyed.sort();
    let mut report = GapReport {
        step,
        duplicates: Vec::new(),
        gaps: Vec::new(),
        irregular: Vec::new(),
        sequential_runs: 0,
        duplicate_pairs: 0,
    };
    let value = |row: usize| column.cells[row].clone();
    for pair in keyed.windows(2) {
        let ((a, ra), (b, rb)) = (pair[0], pair[1]);
        match classify_step(b - a, step) {
            StepClass::Duplicate => {
                report.duplicate_pairs += 1;
                match report.duplicates.last_mut() {
                    Some((_, rows)) if *rows.last().unwrap() == ra => rows.push(rb),
                    _ => report.duplicates.push((value(ra), vec![ra, rb])),
                }
            }
            StepClass::Sequential => report.sequential_runs += 1,
            StepClass::Gap(missing) => report.gaps.push(Gap {
                after: value(ra),
                before: value(rb),
                row: ra,
                missing,
            }),
            StepClass::Irregular => report.irregular.push(IrregularStep {
                after: value(ra),
                before: value(rb),
                row: ra,
                difference: b - a,
            }),
        }
    }
    Ok(report)
}

/// Gap and irregular-step findings for column `col` of `table`. Repeated
/// values are left to the duplicate checks.
pub fn gap_findings(table: &Table, col: usize, report: &GapReport) -> Vec<Finding> {
    let name = &table.columns()[col].name;
    let mut out: Vec<Finding> = report
        .gaps
        .iter()
        .map(|g| {
            Finding::new(
                table.name(),
                "gap",
                format!("`{name}` skips {} value(s) after {}", g.missing, g.after),
            )
            .at(table.address(g.row, col))
            .observed(g.after.clone())
            .expected(format!("next value {}", g.before))
        })
        .collect();
    out.extend(report.irregular.iter().map(|i| {
        Finding::new(
            table.name(),
            "irregular-step",
            format!(
                "`{name}` steps by {} after {}, not a multiple of {}",
                i.difference.normalize(),
                i.after,
                report.step
            ),
        )
        .at(table.address(i.row, col))
        .observed(i.after.clone())
    }));
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use rust_decimal_macros::dec;

    fn nums(values: &[i64]) -> Column {
        Column::new("n", values.iter().map(|&v| CellValue::from(v)).collect())
    }

    #[test]
    fn countif_semantics() {
        let t = Table::from_rows(
            "t",
            ["k"],
            ["A", "B", "A", "C", "A"]
                .iter()
                .map(|s| vec![CellValue::from(*s)])
                .collect(),
        )
        .unwrap();
        let r = find_duplicates(&t, &["k"]).unwrap();
        assert_eq!(r.counts, vec![3, 1, 3, 1, 3]);
        assert_eq!(r.groups, vec![vec![0, 2, 4]]);
        let f = duplicate_findings(&t, &r);
        assert_eq!(f.len(), 1);
        assert_eq!(f[0].addresses.len(), 3);
    }

    #[test]
    fn whole_row_and_missing_column() {
        let t = Table::from_rows(
            "t",
            ["a", "b"],
            vec![
                vec![1.into(), "x".into()],
                vec![1.into(), "y".into()],
                vec![CellValue::number(dec!(1.0)), "x".into()],
            ],
        )
        .unwrap();
        let none: [&str; 0] = [];
        assert_eq!(find_duplicates(&t, &none).unwrap().groups, vec![vec![0, 2]]);
        assert!(find_duplicates(&t, &["zz"]).is_err());
        assert!(find_duplicates(&t, &["b", "a"]).unwrap().groups.len() == 1);
    }

    #[test]
    fn distinct_rows() {
        let t = Table::from_rows("t", ["a"], vec![vec![1.into()], vec![2.into()]]).unwrap();
        assert!(find_duplicates(&t, &["a"]).unwrap().groups.is_empty());
    }

    #[test]
    fn gap_rule() {
        let r = find_gaps(&nums(&[1, 2, 3, 5, 6, 9]), dec!(1)).unwrap();
        let gaps: Vec<_> = r.gaps.iter().map(|g| (g.after.clone(), g.missing)).collect();
        assert_eq!(gaps, vec![(3.into(), 1), (6.into(), 2)]);
        assert!(r.duplicates.is_empty());
        assert_eq!(r.sequential_runs, 3);
        assert_eq!(r.gaps[1].missing_values(dec!(1)), vec![7.into(), 8.into()]);

        let r = find_gaps(&nums(&[1, 1, 2, 4]), dec!(1)).unwrap();
        assert_eq!(r.duplicates, vec![(1.into(), vec![0, 1])]);
        assert_eq!(r.gaps.len(), 1);
        assert_eq!((r.gaps[0].after.clone(), r.gaps[0].missing), (2.into(), 1));
        assert_eq!(r.pair_count(), 3);
    }

    #[test]
    fn triple_duplicate_is_one_group() {
        let r = find_gaps(&nums(&[4, 4, 4]), dec!(1)).unwrap();
        assert_eq!(r.duplicates, vec![(4.into(), vec![0, 1, 2])]);
        assert_eq!(r.duplicate_pairs, 2);
    }

    #[test]
    fn irregular_steps() {
        let r = find_gaps(&nums(&[0, 2, 5, 9]), dec!(2)).unwrap();
        assert_eq!(r.sequential_runs, 1);
        assert_eq!(r.irregular.len(), 1);
        assert_eq!(r.gaps[0].missing, 1);
        let c = Column::new(
            "n",
            vec![CellValue::number(dec!(1)), CellValue::number(dec!(1.5))],
        );
        assert_eq!(find_gaps(&c, dec!(1)).unwrap().irregular.len(), 1);
    }

    #[test]
    fn date_gaps_in_days() {
        let d = |day| CellValue::Date(DateValue::ymd(2024, 1, day).unwrap());
        let c = Column::new("d", vec![d(1), d(2), d(5)]);
        let r = find_gaps(&c, dec!(1)).unwrap();
        assert_eq!(r.gaps[0].missing, 2);
        assert_eq!(r.gaps[0].missing_values(dec!(1)), vec![d(3), d(4)]);
    }

    #[test]
    fn text_is_not_orderable() {
        let c = Column::new("t", vec!["a".into()]);
        assert!(matches!(
            find_gaps(&c, dec!(1)),
            Err(AnalyticsError::NonOrderable { .. })
        ));
        assert!(find_gaps(&nums(&[1]), dec!(0)).is_err());
    }
}
