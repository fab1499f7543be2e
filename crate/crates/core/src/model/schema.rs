use std::collections::BTreeMap;
use std::fmt;

use chrono::{NaiveDate, NaiveDateTime};
use regex::Regex;
use rust_decimal::Decimal;

use super::{compare_values, CellValue, DataType, DateValue, ValueOrdering};
use crate::checks::{ConsistencyRule, Severity};

/// Inclusive bounds for a number or date column.
#[derive(Debug, Clone, PartialEq)]
pub struct ValueRange {
    pub min: CellValue,
    pub max: CellValue,
}

impl ValueRange {
    pub fn new(min: CellValue, max: CellValue) -> Self {
        Self { min, max }
    }

    pub fn numbers(min: Decimal, max: Decimal) -> Self {
        Self::new(CellValue::Number(min), CellValue::Number(max))
    }

    /// Where a value falls relative to the range; `None` when the value is
    /// Null or of another variant.
    pub fn position(&self, value: &CellValue) -> Option<RangePosition> {
        if value.is_null() {
            return None;
        }
        match compare_values(value, &self.min) {
            ValueOrdering::Incomparable => return None,
            ValueOrdering::Less => return Some(RangePosition::Below),
            _ => {}
        }
        match compare_values(value, &self.max) {
            ValueOrdering::Greater => Some(RangePosition::Above),
            ValueOrdering::Incomparable => None,
            _ => Some(RangePosition::Inside),
        }
    }

    pub fn contains(&self, value: &CellValue) -> bool {
        self.position(value) == Some(RangePosition::Inside)
    }
}

impl fmt::Display for ValueRange {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}..{}", self.min, self.max)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RangePosition {
    Below,
    Inside,
    Above,
}

/// A presentation format a column's raw text must follow.
///
/// Date patterns are written either with spreadsheet tokens (`YYYY-MM-DD`,
/// `DD/MM/YY`, `hh:mm:ss`) or as strftime (`%d.%m.%Y`). Anything else is a
/// regular expression that must match the whole value.
#[derive(Debug, Clone)]
pub enum FormatPattern {
    Date { source: String, strftime: String },
    Regex { source: String, regex: Regex },
}

impl FormatPattern {
    pub fn parse(source: &str) -> Result<Self, regex::Error> {
        if let Some(strftime) = spreadsheet_date_pattern(source) {
            return Ok(FormatPattern::Date {
                source: source.to_string(),
                strftime,
            });
        }
        if source.contains('%') && !source.contains('\\') {
            return Ok(FormatPattern::Date {
                source: source.to_string(),
                strftime: source.to_string(),
            });
        }
        let regex = Regex::new(&format!("^(?:{source})$"))?;
        Ok(FormatPattern::Regex {
            source: source.to_string(),
            regex,
        })
    }

    pub fn source(&self) -> &str {
        match self {
            FormatPattern::Date { source, .. } | FormatPattern::Regex { source, .. } => source,
        }
    }

    pub fn is_date(&self) -> bool {
        matches!(self, FormatPattern::Date { .. })
    }

    /// Checks raw text against the pattern. Date patterns are strict: the
    /// text must re-render identically, so `2020-1-5` fails `YYYY-MM-DD`.
    pub fn matches(&self, text: &str) -> bool {
        match self {
            FormatPattern::Regex { regex, .. } => regex.is_match(text),
            FormatPattern::Date { strftime, .. } => parse_date_strict(text, strftime).is_some(),
        }
    }
}

impl PartialEq for FormatPattern {
    fn eq(&self, other: &Self) -> bool {
        self.source() == other.source() && self.is_date() == other.is_date()
    }
}

/// Parses `text` with a strftime pattern, accepting it only if formatting
/// the parsed value reproduces the text exactly.
pub fn parse_date_strict(text: &str, strftime: &str) -> Option<DateValue> {
    let has_time = ["%H", "%M", "%S", "%T", "%R"]
        .iter()
        .any(|t| strftime.contains(t));
    if has_time {
        let dt = NaiveDateTime::parse_from_str(text, strftime).ok()?;
        (dt.format(strftime).to_string() == text).then(|| DateValue::with_time(dt.date(), dt.time()))
    } else {
        let d = NaiveDate::parse_from_str(text, strftime).ok()?;
        (d.format(strftime).to_string() == text).then(|| DateValue::date(d))
    }
}

fn spreadsheet_date_pattern(source: &str) -> Option<String> {
    const TOKENS: [(&str, &str); 8] = [
        ("YYYY", "%Y"),
        ("YY", "%y"),
        ("MM", "%m"),
        ("DD", "%d"),
        ("HH", "%H"),
        ("hh", "%H"),
        ("mm", "%M"),
        ("ss", "%S"),
    ];
    if !(source.contains("YY") && source.contains("DD")) {
        return None;
    }
    let mut out = String::new();
    let mut rest = source;
    'outer: while !rest.is_empty() {
        for (tok, fmt) in TOKENS {
            if let Some(tail) = rest.strip_prefix(tok) {
                out.push_str(fmt);
                rest = tail;
                continue 'outer;
            }
        }
        let c = rest.chars().next()?;
        if !matches!(c, '-' | '/' | '.' | ' ' | ':' | 'T') {
            return None;
        }
        out.push(c);
        rest = &rest[c.len_utf8()..];
    }
    Some(out)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ForeignKey {
    pub table: String,
    pub column: String,
}

impl fmt::Display for ForeignKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}.{}", self.table, self.column)
    }
}

/// Declared metadata for one column.
#[derive(Debug, Clone, PartialEq)]
pub struct ColumnSpec {
    pub name: String,
    pub data_type: DataType,
    pub nullable: bool,
    pub default_value: Option<CellValue>,
    pub range: Option<ValueRange>,
    pub restricted_values: Option<Vec<CellValue>>,
    /// Restricted-value matching ignores case when set.
    pub case_insensitive: bool,
    pub max_size: Option<usize>,
    pub format: Option<FormatPattern>,
    pub unit: Option<String>,
    pub is_primary_key: bool,
    pub foreign_key: Option<ForeignKey>,
    /// Expected step between sorted key values; enables gap detection.
    pub sequence_step: Option<Decimal>,
    /// Amount column eligible for leading-digit analysis during audits.
    pub benford: bool,
    /// Free-form metadata with no check semantics (source, authority, update frequency).
    pub annotations: BTreeMap<String, String>,
}

impl ColumnSpec {
    pub fn new(name: impl Into<String>, data_type: DataType) -> Self {
        Self {
            name: name.into(),
            data_type,
            nullable: true,
            default_value: None,
            range: None,
            restricted_values: None,
            case_insensitive: false,
            max_size: None,
            format: None,
            unit: None,
            is_primary_key: false,
            foreign_key: None,
            sequence_step: None,
            benford: false,
            annotations: BTreeMap::new(),
        }
    }

    pub fn required(mut self) -> Self {
        self.nullable = false;
        self
    }

    pub fn primary_key(mut self) -> Self {
        self.is_primary_key = true;
        self.nullable = false;
        self
    }

    pub fn with_range(mut self, min: impl Into<CellValue>, max: impl Into<CellValue>) -> Self {
        self.range = Some(ValueRange::new(min.into(), max.into()));
        self
    }

    pub fn with_values<V: Into<CellValue>>(mut self, values: impl IntoIterator<Item = V>) -> Self {
        self.restricted_values = Some(values.into_iter().map(Into::into).collect());
        self
    }

    pub fn with_max_size(mut self, size: usize) -> Self {
        self.max_size = Some(size);
        self
    }

    pub fn with_format(mut self, pattern: &str) -> Self {
        self.format = Some(FormatPattern::parse(pattern).expect("valid format pattern"));
        self
    }

    pub fn with_foreign_key(mut self, table: &str, column: &str) -> Self {
        self.foreign_key = Some(ForeignKey {
            table: table.to_string(),
            column: column.to_string(),
        });
        self
    }

    /// Checks the spec's own invariants.
    pub fn validate(&self) -> Result<(), String> {
        if self.is_primary_key && self.nullable {
            return Err(format!(
                "column `{}`: a primary key cannot be nullable",
                self.name
            ));
        }
        if let Some(range) = &self.range {
            let variant_ok = match self.data_type {
                DataType::Number => {
                    matches!(
                        (&range.min, &range.max),
                        (CellValue::Number(_), CellValue::Number(_))
                    )
                }
                DataType::Date => {
                    matches!((&range.min, &range.max), (CellValue::Date(_), CellValue::Date(_)))
                }
                DataType::Text | DataType::Boolean => {
                    return Err(format!(
                        "column `{}`: range is only supported for number and date columns",
                        self.name
                    ))
                }
            };
            if !variant_ok {
                return Err(format!(
                    "column `{}`: range bounds must be {} values",
                    self.name, self.data_type
                ));
            }
            if compare_values(&range.min, &range.max) == ValueOrdering::Greater {
                return Err(format!(
                    "column `{}`: range minimum {} exceeds maximum {}",
                    self.name, range.min, range.max
                ));
            }
        }
        if let Some(values) = &self.restricted_values {
            if values.iter().any(CellValue::is_null) {
                return Err(format!(
                    "column `{}`: restricted values cannot include null",
                    self.name
                ));
            }
        }
        if let Some(step) = self.sequence_step {
            if step <= Decimal::ZERO {
                return Err(format!("column `{}`: step must be positive", self.name));
            }
        }
        Ok(())
    }

    /// Whether a non-null value belongs to the restricted list (true when
    /// no list is declared).
    pub fn allows_value(&self, value: &CellValue) -> bool {
        let Some(values) = &self.restricted_values else {
            return true;
        };
        if value.is_null() {
            return false;
        }
        values.iter().any(|allowed| match (allowed, value) {
            (CellValue::Text(a), CellValue::Text(v)) => {
                let v = v.trim();
                if self.case_insensitive {
                    a.to_lowercase() == v.to_lowercase()
                } else {
                    a == v
                }
            }
            (a, v) => a == v,
        })
    }
}

/// Declared metadata for a whole table.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Schema {
    pub table: String,
    pub columns: Vec<ColumnSpec>,
    pub rules: Vec<ConsistencyRule>,
    /// Check id → severity replacing the registry default.
    pub severity_overrides: BTreeMap<String, Severity>,
}

impl Schema {
    pub fn new(table: impl Into<String>) -> Self {
        Self {
            table: table.into(),
            columns: Vec::new(),
            rules: Vec::new(),
            severity_overrides: BTreeMap::new(),
        }
    }

    pub fn with_column(mut self, spec: ColumnSpec) -> Self {
        self.columns.push(spec);
        self
    }

    pub fn with_rule(mut self, rule: ConsistencyRule) -> Self {
        self.rules.push(rule);
        self
    }

    pub fn spec(&self, column: &str) -> Option<&ColumnSpec> {
        self.columns.iter().find(|c| c.name == column)
    }

    pub fn primary_key(&self) -> Vec<&ColumnSpec> {
        self.columns.iter().filter(|c| c.is_primary_key).collect()
    }

    pub fn validate(&self) -> Result<(), String> {
        let mut seen = std::collections::HashSet::new();
        for spec in &self.columns {
            if !seen.insert(spec.name.as_str()) {
                return Err(format!("column `{}` is declared twice", spec.name));
            }
            spec.validate()?;
        }
        let mut rule_names = std::collections::HashSet::new();
        for rule in &self.rules {
            if !rule_names.insert(rule.name.as_str()) {
                return Err(format!("rule `{}` is declared twice", rule.name));
            }
        }
        Ok(())
    }
}
