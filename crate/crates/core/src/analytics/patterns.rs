use std::collections::{BTreeSet, HashMap};

use num_traits::ToPrimitive;
use rust_decimal::Decimal;

use super::AnalyticsError;
use crate::checks::Finding;
use crate::model::{CellValue, Column, DataType, DateValue, Schema, Table};

/// Values that look like placeholders rather than data.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SuspiciousPatterns {
    /// Flag numbers whose digits are all 9 and at least this many; 0 disables.
    pub min_nines: usize,
    /// Placeholder dates, matched on the calendar day.
    pub dates: Vec<DateValue>,
    /// Placeholder text, matched trimmed and case-insensitively.
    pub placeholders: BTreeSet<String>,
    /// Flag zeros in number columns whose declared range excludes zero.
    pub zero_outside_range: bool,
}

impl Default for SuspiciousPatterns {
    fn default() -> Self {
        Self {
            min_nines: 2,
            dates: [(2001, 1, 1), (1900, 1, 1), (1999, 12, 31)]
                .iter()
                .filter_map(|&(y, m, d)| DateValue::ymd(y, m, d))
                .collect(),
            placeholders: ["TBD", "XXX", "N/A", "TEST"]
                .iter()
                .map(|s| s.to_string())
                .collect(),
            zero_outside_range: true,
        }
    }
}

impl SuspiciousPatterns {
    /// Reads overrides, one `key = value` per line on top of the defaults:
    ///
    /// ```text
    /// nines = 3
    /// dates = 2001-01-01, 1970-01-01
    /// placeholders = TBD, UNKNOWN
    /// zero_outside_range = false
    /// ```
    ///
    /// An empty list clears that detector. `#` starts a comment.
    pub fn parse(text: &str) -> Result<Self, String> {
        let mut p = Self::default();
        for (n, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| format!("line {}: expected `key = value`", n + 1))?;
            let value = value.trim();
            let items = || value.split(',').map(str::trim).filter(|s| !s.is_empty());
            match key.trim() {
                "nines" => {
                    p.min_nines = value
                        .parse()
                        .map_err(|_| format!("line {}: `{value}` is not a count", n + 1))?
                }
                "dates" => {
                    p.dates = items()
                        .map(|s| s.parse().map_err(|_| format!("line {}: bad date `{s}`", n + 1)))
                        .collect::<Result<_, _>>()?
                }
                "placeholders" => p.placeholders = items().map(str::to_uppercase).collect(),
                "zero_outside_range" => {
                    p.zero_outside_range = value
                        .parse()
                        .map_err(|_| format!("line {}: expected true or false", n + 1))?
                }
                other => return Err(format!("line {}: unknown key `{other}`", n + 1)),
            }
        }
        Ok(p)
    }

    fn all_nines(&self, d: Decimal) -> bool {
        if self.min_nines == 0 {
            return false;
        }
        let digits = d.normalize().mantissa().unsigned_abs().to_string();
        digits.len() >= self.min_nines && digits.bytes().all(|b| b == b'9')
    }

    /// Why a value looks suspicious, if it does.
    pub fn reason(&self, value: &CellValue, zero_excluded: bool) -> Option<String> {
        match value {
            CellValue::Number(d) if self.all_nines(*d) => Some(format!("all-nines value {value}")),
            CellValue::Number(d) if d.is_zero() && zero_excluded => {
                Some("zero outside the declared range".to_string())
            }
            CellValue::Date(dv) if self.dates.iter().any(|p| p.date == dv.date) => {
                Some(format!("placeholder date {value}"))
            }
            CellValue::Text(s) if self.placeholders.contains(&s.trim().to_uppercase()) => {
                Some(format!("placeholder text `{}`", s.trim()))
            }
            _ => None,
        }
    }
}

/// Placeholder-looking values anywhere in the table, one finding per cell.
pub fn find_suspicious(
    table: &Table,
    schema: Option<&Schema>,
    patterns: &SuspiciousPatterns,
) -> Vec<Finding> {
    (0..table.column_count())
        .flat_map(|col| suspicious_in_column(table, col, schema, patterns))
        .collect()
}

pub fn suspicious_in_column(
    table: &Table,
    col: usize,
    schema: Option<&Schema>,
    patterns: &SuspiciousPatterns,
) -> Vec<Finding> {
    let column = &table.columns()[col];
    let spec = schema.and_then(|s| s.spec(&column.name));
    let sequence = spec.is_some_and(|s| s.sequence_step.is_some());
    let zero_excluded = patterns.zero_outside_range
        && spec
            .filter(|spec| spec.data_type == DataType::Number)
            .and_then(|spec| spec.range.as_ref())
            .is_some_and(|r| !r.contains(&CellValue::from(0)));
    column
        .non_null()
        .filter_map(|(row, cell)| {
            if sequence && matches!(cell, CellValue::Number(_)) && patterns.reason(cell, false).is_some() {
                return None;
            }
            let reason = patterns.reason(cell, zero_excluded)?;
            Some(
                Finding::new(
                    table.name(),
                    "suspicious",
                    format!("`{}` holds {reason}", column.name),
                )
                .at(table.address(row, col))
                .observed(cell.clone()),
            )
        })
        .collect()
}

/// A single value covering an outsized share of a column.
#[derive(Debug, Clone, PartialEq)]
pub struct Dominance {
    pub value: CellValue,
    pub count: usize,
    pub total: usize,
    pub share: f64,
}

impl Dominance {
    pub fn to_finding(&self, table: &Table, col: usize) -> Finding {
        Finding::new(
            table.name(),
            "dominance",
            format!(
                "`{}` is {} in {:.2}% of cells ({} of {}); valid but possibly incorrect",
                table.columns()[col].name,
                self.value,
                self.share * 100.0,
                self.count,
                self.total
            ),
        )
        .on_columns([col as u32 + 1])
        .observed(self.value.clone())
    }
}

/// Minimum non-Null cells before dominance is judged.
pub const DOMINANCE_MIN_VALUES: usize = 20;
/// Minimum domain size before dominance is judged.
pub const DOMINANCE_MIN_DISTINCT: usize = 3;

/// The most frequent value when its share reaches `threshold`. The domain
/// size is the declared restricted list when given, else the observed
/// distinct values. Ties go to the smaller value.
pub fn dominance(
    column: &Column,
    threshold: f64,
    restricted_values: Option<&[CellValue]>,
) -> Option<Dominance> {
    let mut counts: HashMap<&CellValue, usize> = HashMap::new();
    for (_, cell) in column.non_null() {
        *counts.entry(cell).or_default() += 1;
    }
    let total: usize = counts.values().sum();
    let distinct = restricted_values.map_or(counts.len(), <[CellValue]>::len);
    if total < DOMINANCE_MIN_VALUES || distinct < DOMINANCE_MIN_DISTINCT {
        return None;
    }
    let (value, count) = counts
        .into_iter()
        .max_by(|(va, ca), (vb, cb)| ca.cmp(cb).then_with(|| vb.cmp(va)))?;
    let share = count as f64 / total as f64;
    (count as f64 >= threshold * total as f64).then(|| Dominance {
        value: value.clone(),
        count,
        total,
        share,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct OutlierReport {
    pub q1: Decimal,
    pub q3: Decimal,
    pub iqr: Decimal,
    pub lower: Decimal,
    pub upper: Decimal,
    /// 0-based rows outside `[lower, upper]`.
    pub rows: Vec<usize>,
}

/// Quantile `p` of ascending values by linear interpolation between closest
/// ranks: with `h = (n − 1)·p`, the result is `x[⌊h⌋] + (h − ⌊h⌋)·(x[⌊h⌋+1] − x[⌊h⌋])`
/// (0-based). This is the spreadsheet `PERCENTILE`/`QUARTILE` method,
/// computed in exact decimals.
pub fn quartile(sorted: &[Decimal], p: Decimal) -> Decimal {
    assert!(!sorted.is_empty(), "quartile of an empty list");
    let h = Decimal::from(sorted.len() - 1) * p;
    let lo = h.floor();
    let i = lo.to_usize().unwrap_or(0);
    let frac = h - lo;
    match sorted.get(i + 1) {
        Some(next) if !frac.is_zero() => sorted[i] + frac * (next - sorted[i]),
        _ => sorted[i],
    }
}

/// Tukey fences `[Q1 − k·IQR, Q3 + k·IQR]` with quartiles from [`quartile`].
pub fn outliers(column: &Column, k: Decimal) -> Result<OutlierReport, AnalyticsError> {
    if k <= Decimal::ZERO {
        return Err(AnalyticsError::BadParameter(format!(
            "k must be positive, got {k}"
        )));
    }
    let mut values = Vec::new();
    for (row, cell) in column.non_null() {
        match cell {
            CellValue::Number(d) => values.push((*d, row)),
            _ => {
                return Err(AnalyticsError::NotNumeric {
                    column: column.name.clone(),
                })
            }
        }
    }
    if values.len() < 4 {
        return Err(AnalyticsError::TooFewValues {
            column: column.name.clone(),
            found: values.len(),
            needed: 4,
        });
    }
    let mut sorted: Vec<Decimal> = values.iter().map(|(d, _)| *d).collect();
    sorted.sort();
    let q1 = quartile(&sorted, Decimal::new(25, 2));
    let q3 = quartile(&sorted, Decimal::new(75, 2));
    let iqr = q3 - q1;
    let (lower, upper) = (q1 - k * iqr, q3 + k * iqr);
    let rows = values
        .iter()
        .filter(|(d, _)| *d < lower || *d > upper)
        .map(|(_, r)| *r)
        .collect();
    Ok(OutlierReport {
        q1,
        q3,
        iqr,
        lower,
        upper,
        rows,
    })
}

pub fn outlier_findings(table: &Table, col: usize, k: Decimal) -> Result<Vec<Finding>, AnalyticsError> {
    let column = &table.columns()[col];
    let report = outliers(column, k)?;
    let fences = format!("[{}, {}]", report.lower.normalize(), report.upper.normalize());
    Ok(report
        .rows
        .iter()
        .map(|&row| {
            let value = column.cells[row].clone();
            Finding::new(
                table.name(),
                "outlier",
                format!("`{}` value {value} is outside {fences}", column.name),
            )
            .at(table.address(row, col))
            .observed(value)
            .expected(fences.clone())
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::ColumnSpec;
    use rust_decimal_macros::dec;

    fn nums(values: &[i64]) -> Column {
        Column::new("n", values.iter().map(|&v| CellValue::from(v)).collect())
    }

    #[test]
    fn suspicious_defaults() {
        let p = SuspiciousPatterns::default();
        assert!(p.reason(&99999.into(), false).is_some());
        assert!(p.reason(&99.into(), false).is_some());
        assert!(p.reason(&9.into(), false).is_none());
        assert!(p.reason(&12345.into(), false).is_none());
        assert!(p
            .reason(&CellValue::Date(DateValue::ymd(2001, 1, 1).unwrap()), false)
            .is_some());
        assert!(p.reason(&" tbd ".into(), false).is_some());
        assert!(p.reason(&0.into(), true).is_some());
        assert!(p.reason(&0.into(), false).is_none());
    }

    #[test]
    fn suspicious_table() {
        let t = Table::from_rows(
            "t",
            ["a", "b"],
            vec![vec![0.into(), "ok".into()], vec![99999.into(), "XXX".into()]],
        )
        .unwrap();
        let schema =
            Schema::new("t").with_column(ColumnSpec::new("a", DataType::Number).with_range(1, 100_000));
        let f = find_suspicious(&t, Some(&schema), &SuspiciousPatterns::default());
        let locs: Vec<_> = f.iter().map(Finding::location).collect();
        assert_eq!(locs, ["A1", "A2", "B2"]);
        assert_eq!(find_suspicious(&t, None, &SuspiciousPatterns::default()).len(), 2);
    }

    #[test]
    fn key_sequences_may_hold_nines() {
        let t = Table::from_rows("t", ["id"], (98..101).map(|i| vec![i.into()]).collect()).unwrap();
        let mut spec = ColumnSpec::new("id", DataType::Number).primary_key();
        spec.sequence_step = Some(Decimal::ONE);
        let schema = Schema::new("t").with_column(spec);
        assert!(find_suspicious(&t, Some(&schema), &SuspiciousPatterns::default()).is_empty());
        assert_eq!(find_suspicious(&t, None, &SuspiciousPatterns::default()).len(), 1);
    }

    #[test]
    fn pattern_overrides() {
        let p = SuspiciousPatterns::parse("nines = 3\nplaceholders = unknown\n# c\ndates =").unwrap();
        assert!(p.reason(&99.into(), false).is_none());
        assert!(p.reason(&"Unknown".into(), false).is_some());
        assert!(p.reason(&"TBD".into(), false).is_none());
        assert!(p.dates.is_empty());
        assert!(SuspiciousPatterns::parse("colour = red").is_err());
    }

    #[test]
    fn broken_legs() {
        let mut cells = vec![CellValue::from("BROKEN_LEG"); 80];
        for i in 0..20 {
            cells.push(["ARM", "HEAD", "BACK"][i % 3].into());
        }
        let d = dominance(&Column::new("claim", cells), 0.5, None).unwrap();
        assert_eq!(d.share, 0.8);
        assert_eq!(d.value, "BROKEN_LEG".into());
    }

    #[test]
    fn dominance_guards() {
        let uniform: Vec<CellValue> = (0..100).map(|i| CellValue::from(i % 4)).collect();
        assert!(dominance(&Column::new("u", uniform), 0.5, None).is_none());
        let binary: Vec<CellValue> = (0..100).map(|i| CellValue::from(i < 60)).collect();
        assert!(dominance(&Column::new("b", binary.clone()), 0.5, None).is_none());
        let domain = [true.into(), false.into(), CellValue::text("?")];
        assert!(dominance(&Column::new("b", binary), 0.5, Some(&domain)).is_some());
        let few = vec![CellValue::from(1); 19];
        assert!(dominance(&Column::new("f", few), 0.5, Some(&domain)).is_none());
    }

    #[test]
    fn quartiles_by_interpolation() {
        let r = outliers(&nums(&[1, 2, 3, 4, 100]), dec!(1.5)).unwrap();
        assert_eq!((r.q1, r.q3, r.iqr), (dec!(2), dec!(4), dec!(2)));
        assert_eq!((r.lower, r.upper), (dec!(-1), dec!(7)));
        assert_eq!(r.rows, vec![4]);
        let r = outliers(&nums(&[1, 2, 3, 4]), dec!(1.5)).unwrap();
        assert_eq!((r.q1, r.q3), (dec!(1.75), dec!(3.25)));
        assert!(r.rows.is_empty());
        assert!(outliers(&nums(&[7; 10]), dec!(1.5)).unwrap().rows.is_empty());
    }

    #[test]
    fn outlier_errors() {
        assert!(matches!(
            outliers(&nums(&[1, 2, 3]), dec!(1.5)),
            Err(AnalyticsError::TooFewValues { .. })
        ));
        let t = Column::new("t", vec!["a".into(); 5]);
        assert!(matches!(
            outliers(&t, dec!(1.5)),
            Err(AnalyticsError::NotNumeric { .. })
        ));
    }
}
