use std::cmp::Ordering;
use std::fmt;

use chrono::{Datelike, NaiveDate, NaiveDateTime, NaiveTime};
use rust_decimal::Decimal;
use serde::{Deserialize, Serialize};

/// Calendar date (proleptic Gregorian) with an optional time of day.
///
/// Serialized as ISO 8601 text: `2020-01-31` or `2020-01-31T08:30:00`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct DateValue {
    pub date: NaiveDate,
    pub time: Option<NaiveTime>,
}

impl DateValue {
    pub fn date(date: NaiveDate) -> Self {
        Self { date, time: None }
    }

    pub fn with_time(date: NaiveDate, time: NaiveTime) -> Self {
        Self {
            date,
            time: Some(time),
        }
    }

    pub fn ymd(year: i32, month: u32, day: u32) -> Option<Self> {
        NaiveDate::from_ymd_opt(year, month, day).map(Self::date)
    }

    /// Seconds since 0001-01-01T00:00:00, used for exact date differences.
    pub(crate) fn seconds(&self) -> i64 {
        let days = i64::from(self.date.num_days_from_ce());
        let secs = self
            .time
            .map(|t| i64::from(chrono::Timelike::num_seconds_from_midnight(&t)))
            .unwrap_or(0);
        days * 86_400 + secs
    }
}

impl fmt::Display for DateValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.time {
            None => write!(f, "{}", self.date.format("%Y-%m-%d")),
            Some(t) => write!(f, "{}T{}", self.date.format("%Y-%m-%d"), t.format("%H:%M:%S")),
        }
    }
}

impl std::str::FromStr for DateValue {
    type Err = chrono::ParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match NaiveDate::parse_from_str(s, "%Y-%m-%d") {
            Ok(date) => Ok(Self::date(date)),
            Err(e) => {
                let dt = NaiveDateTime::parse_from_str(s, "%Y-%m-%dT%H:%M:%S")
                    .or_else(|_| NaiveDateTime::parse_from_str(s, "%Y-%m-%d %H:%M:%S"))
                    .map_err(|_| e)?;
                Ok(Self::with_time(dt.date(), dt.time()))
            }
        }
    }
}

impl Serialize for DateValue {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for DateValue {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// The expected storage type of a column.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DataType {
    Number,
    Text,
    Date,
    Boolean,
}

impl DataType {
    pub fn as_str(self) -> &'static str {
        match self {
            DataType::Number => "number",
            DataType::Text => "text",
            DataType::Date => "date",
            DataType::Boolean => "boolean",
        }
    }
}

impl fmt::Display for DataType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for DataType {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "number" => Ok(DataType::Number),
            "text" => Ok(DataType::Text),
            "date" => Ok(DataType::Date),
            "boolean" => Ok(DataType::Boolean),
            other => Err(format!("unknown data type `{other}`")),
        }
    }
}

/// A typed scalar held in one cell.
///
/// Numbers are exact decimals: the scale of the stored [`Decimal`] is the
/// recorded precision (count of fractional digits), so `1.50` keeps two
/// fractional digits while still comparing equal to `1.5`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "type", content = "value", rename_all = "lowercase")]
pub enum CellValue {
    Null,
    Number(Decimal),
    Text(String),
    Date(DateValue),
    Boolean(bool),
}

impl CellValue {
    pub fn number(value: impl Into<Decimal>) -> Self {
        CellValue::Number(value.into())
    }

    pub fn text(value: impl Into<String>) -> Self {
        CellValue::Text(value.into())
    }

    pub fn is_null(&self) -> bool {
        matches!(self, CellValue::Null)
    }

    pub fn data_type(&self) -> Option<DataType> {
        match self {
            CellValue::Null => None,
            CellValue::Number(_) => Some(DataType::Number),
            CellValue::Text(_) => Some(DataType::Text),
            CellValue::Date(_) => Some(DataType::Date),
            CellValue::Boolean(_) => Some(DataType::Boolean),
        }
    }

    pub fn as_number(&self) -> Option<Decimal> {
        match self {
            CellValue::Number(d) => Some(*d),
            _ => None,
        }
    }

    pub fn as_text(&self) -> Option<&str> {
        match self {
            CellValue::Text(s) => Some(s),
            _ => None,
        }
    }

    /// Count of fractional digits recorded for a number.
    pub fn precision(&self) -> Option<u32> {
        self.as_number().map(|d| d.scale())
    }

    fn variant_rank(&self) -> u8 {
        match self {
            CellValue::Null => 0,
            CellValue::Boolean(_) => 1,
            CellValue::Number(_) => 2,
            CellValue::Date(_) => 3,
            CellValue::Text(_) => 4,
        }
    }
}

impl fmt::Display for CellValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CellValue::Null => Ok(()),
            CellValue::Number(d) => write!(f, "{d}"),
            CellValue::Text(s) => f.write_str(s),
            CellValue::Date(d) => write!(f, "{d}"),
            CellValue::Boolean(b) => write!(f, "{b}"),
        }
    }
}

/// Outcome of comparing two cells that may hold different variants.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ValueOrdering {
    Less,
    Equal,
    Greater,
    Incomparable,
}

impl From<Ordering> for ValueOrdering {
    fn from(o: Ordering) -> Self {
        match o {
            Ordering::Less => ValueOrdering::Less,
            Ordering::Equal => ValueOrdering::Equal,
            Ordering::Greater => ValueOrdering::Greater,
        }
    }
}

impl ValueOrdering {
    pub fn ordering(self) -> Option<Ordering> {
        match self {
            ValueOrdering::Less => Some(Ordering::Less),
            ValueOrdering::Equal => Some(Ordering::Equal),
            ValueOrdering::Greater => Some(Ordering::Greater),
            ValueOrdering::Incomparable => None,
        }
    }
}

/// Orders two cells within a variant. Null sorts before everything; pairs of
/// different non-null variants are incomparable.
pub fn compare_values(a: &CellValue, b: &CellValue) -> ValueOrdering {
    use CellValue::*;
    match (a, b) {
        (Null, Null) => ValueOrdering::Equal,
        (Null, _) => ValueOrdering::Less,
        (_, Null) => ValueOrdering::Greater,
        (Number(x), Number(y)) => x.cmp(y).into(),
        (Text(x), Text(y)) => x.cmp(y).into(),
        (Date(x), Date(y)) => x.cmp(y).into(),
        (Boolean(x), Boolean(y)) => x.cmp(y).into(),
        _ => ValueOrdering::Incomparable,
    }
}

/// Total order used for canonical output: variants are ranked
/// (Null, Boolean, Number, Date, Text), then ordered within the variant.
impl Ord for CellValue {
    fn cmp(&self, other: &Self) -> Ordering {
        compare_values(self, other)
            .ordering()
            .unwrap_or_else(|| self.variant_rank().cmp(&other.variant_rank()))
    }
}

impl PartialOrd for CellValue {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl From<Decimal> for CellValue {
    fn from(d: Decimal) -> Self {
        CellValue::Number(d)
    }
}

impl From<i64> for CellValue {
    fn from(v: i64) -> Self {
        CellValue::Number(Decimal::from(v))
    }
}

impl From<&str> for CellValue {
    fn from(v: &str) -> Self {
        CellValue::Text(v.to_string())
    }
}

impl From<bool> for CellValue {
    fn from(v: bool) -> Self {
        CellValue::Boolean(v)
    }
}

impl From<DateValue> for CellValue {
    fn from(v: DateValue) -> Self {
        CellValue::Date(v)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rust_decimal_macros::dec;

    #[test]
    fn numeric_order() {
        let two = CellValue::Number(dec!(2));
        let ten = CellValue::Number(dec!(10));
        assert_eq!(compare_values(&two, &ten), ValueOrdering::Less);
    }

    #[test]
    fn null_sorts_first() {
        let zero = CellValue::Number(Decimal::ZERO);
        assert_eq!(compare_values(&CellValue::Null, &zero), ValueOrdering::Less);
        assert_eq!(compare_values(&zero, &CellValue::Null), ValueOrdering::Greater);
    }

    #[test]
    fn cross_variant_is_incomparable() {
        let t = CellValue::text("5");
        let n = CellValue::Number(dec!(5));
        assert_eq!(compare_values(&t, &n), ValueOrdering::Incomparable);
    }

    #[test]
    fn null_is_not_empty_text() {
        assert_ne!(CellValue::Null, CellValue::text(""));
    }

    #[test]
    fn precision_is_kept() {
        let v = CellValue::Number(dec!(1.50));
        assert_eq!(v.precision(), Some(2));
        assert_eq!(v.to_string(), "1.50");
        assert_eq!(v, CellValue::Number(dec!(1.5)));
    }

    #[test]
    fn equal_numbers_hash_equal() {
        use std::collections::HashSet;
        let mut set = HashSet::new();
        set.insert(CellValue::Number(dec!(1.50)));
        assert!(set.contains(&CellValue::Number(dec!(1.5))));
        assert!(!set.contains(&CellValue::Number(dec!(1))));
    }

    #[test]
    fn date_display() {
        let d = DateValue::ymd(2020, 1, 2).unwrap();
        assert_eq!(d.to_string(), "2020-01-02");
        let t = DateValue::with_time(d.date, NaiveTime::from_hms_opt(3, 4, 5).unwrap());
        assert_eq!(t.to_string(), "2020-01-02T03:04:05");
    }

    fn any_number() -> impl Strategy<Value = CellValue> {
        (any::<i64>(), 0u32..6).prop_map(|(m, s)| CellValue::Number(Decimal::new(m, s)))
    }

    proptest! {
        #[test]
        fn numbers_totally_ordered(a in any_number(), b in any_number(), c in any_number()) {
            let ab = compare_values(&a, &b);
            let ba = compare_values(&b, &a);
            prop_assert_ne!(ab, ValueOrdering::Incomparable);
            // antisymmetry
            prop_assert_eq!(ab.ordering().unwrap(), ba.ordering().unwrap().reverse());
            // transitivity
            if ab != ValueOrdering::Greater && compare_values(&b, &c) != ValueOrdering::Greater {
                prop_assert_ne!(compare_values(&a, &c), ValueOrdering::Greater);
            }
        }

        #[test]
        fn text_totally_ordered(a in "[a-c]{0,3}", b in "[a-c]{0,3}", c in "[a-c]{0,3}") {
            let (a, b, c) = (CellValue::Text(a), CellValue::Text(b), CellValue::Text(c));
            let ab = compare_values(&a, &b).ordering().unwrap();
            prop_assert_eq!(ab, compare_values(&b, &a).ordering().unwrap().reverse());
            if ab.is_le() && compare_values(&b, &c).ordering().unwrap().is_le() {
                prop_assert!(compare_values(&a, &c).ordering().unwrap().is_le());
            }
        }

        #[test]
        fn dates_totally_ordered(a in 0i32..5000, b in 0i32..5000, c in 0i32..5000) {
            let base = NaiveDate::from_ymd_opt(2000, 1, 1).unwrap();
            let mk = |d: i32| CellValue::Date(DateValue::date(base + chrono::Duration::days(d.into())));
            let (x, y, z) = (mk(a), mk(b), mk(c));
            prop_assert_eq!(compare_values(&x, &y).ordering(), Some(a.cmp(&b)));
            if a <= b && b <= c {
                prop_assert!(compare_values(&x, &z).ordering().unwrap().is_le());
            }
        }
    }
}
