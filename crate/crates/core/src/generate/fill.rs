use std::collections::BTreeMap;

use chrono::{Days, NaiveDate};
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rust_decimal::Decimal;

use super::{rng_for, GenerateError};
use crate::checks::cell_violations;
use crate::model::{CellValue, Column, ColumnSpec, DataType, DateValue, FormatPattern, Schema, Table};

/// How a column is filled.
#[derive(Debug, Clone, PartialEq)]
pub enum Fill {
    /// Uniform draws that satisfy the column spec.
    Random,
    Fixed(CellValue),
    /// `start, start + step, …`. Dates step in days; text increments its
    /// trailing digits (`INV-0099` → `INV-0100`).
    Incremental {
        start: CellValue,
        step: Decimal,
    },
}

const RETRIES: usize = 200;

/// Builds `rows` rows for `schema`. Columns without an entry in `fills`
/// are incremental when they are a primary key or declare a step, and
/// random otherwise. Each column draws from its own ChaCha8 stream, so
/// adding a column leaves the others unchanged.
pub fn generate_table(
    schema: &Schema,
    rows: usize,
    fills: &BTreeMap<String, Fill>,
    seed: u64,
) -> Result<Table, GenerateError> {
    schema.validate().map_err(GenerateError::InvalidSchema)?;
    if let Some(name) = fills.keys().find(|n| schema.spec(n).is_none()) {
        return Err(GenerateError::InvalidSchema(format!(
            "fill given for unknown column `{name}`"
        )));
    }
    let mut columns = Vec::with_capacity(schema.columns.len());
    for (i, spec) in schema.columns.iter().enumerate() {
        let fill = fills
            .get(&spec.name)
            .cloned()
            .unwrap_or_else(|| default_fill(spec, rows));
        let mut rng = rng_for(seed, i as u64);
        let cells = fill_column(spec, &fill, rows, &mut rng)?;
        columns.push(Column::new(spec.name.clone(), cells));
    }
    let name = if schema.table.is_empty() {
        "generated"
    } else {
        &schema.table
    };
    Ok(Table::new(name, columns).expect("all columns have `rows` cells"))
}

fn default_fill(spec: &ColumnSpec, rows: usize) -> Fill {
    if !(spec.is_primary_key || spec.sequence_step.is_some()) {
        return Fill::Random;
    }
    let step = spec.sequence_step.unwrap_or(Decimal::ONE);
    let min = spec.range.as_ref().map(|r| r.min.clone());
    let start = match spec.data_type {
        DataType::Number => min.unwrap_or(CellValue::from(1)),
        DataType::Date => min.unwrap_or(CellValue::Date(DateValue::ymd(2000, 1, 1).unwrap())),
        DataType::Text => {
            let width = rows.to_string().len().max(6);
            CellValue::Text(format!("{:0width$}", 1))
        }
        DataType::Boolean => return Fill::Random,
    };
    Fill::Incremental { start, step }
}

fn unsatisfiable(spec: &ColumnSpec, reason: impl Into<String>) -> GenerateError {
    GenerateError::UnsatisfiableSpec {
        column: spec.name.clone(),
        reason: reason.into(),
    }
}

fn fill_column(
    spec: &ColumnSpec,
    fill: &Fill,
    rows: usize,
    rng: &mut ChaCha8Rng,
) -> Result<Vec<CellValue>, GenerateError> {
    let check = |value: CellValue, what: &str| -> Result<CellValue, GenerateError> {
        match cell_violations(spec, &value).first() {
            None => Ok(value),
            Some(v) => Err(unsatisfiable(
                spec,
                format!("{what} {value} fails the {} check", v.check_id()),
            )),
        }
    };
    match fill {
        Fill::Fixed(value) => {
            if value.is_null() && !spec.nullable {
                return Err(unsatisfiable(spec, "fixed Null in a non-nullable column"));
            }
            let value = check(value.clone(), "fixed value")?;
            Ok(vec![value; rows])
        }
        Fill::Incremental { start, step } => (0..rows)
            .map(|i| {
                let value = increment(start, *step, i as u64)
                    .ok_or_else(|| unsatisfiable(spec, format!("cannot step {start} by {step}")))?;
                check(value, "incremental value")
            })
            .collect(),
        Fill::Random => {
            let sampler = Sampler::new(spec)?;
            (0..rows).map(|_| sampler.draw(spec, rng)).collect()
        }
    }
}

fn increment(start: &CellValue, step: Decimal, i: u64) -> Option<CellValue> {
    let by = step.checked_mul(Decimal::from(i))?;
    match start {
        CellValue::Number(d) => d.checked_add(by).map(CellValue::Number),
        CellValue::Date(dv) => {
            if !by.fract().is_zero() {
                return None;
            }
            use num_traits::ToPrimitive;
            let days = by.to_i64()?;
            let date = if days >= 0 {
                dv.date.checked_add_days(Days::new(days as u64))?
            } else {
                dv.date.checked_sub_days(Days::new(days.unsigned_abs()))?
            };
            Some(CellValue::Date(DateValue { date, time: dv.time }))
        }
        CellValue::Text(s) => {
            use num_traits::ToPrimitive;
            let digits = s.bytes().rev().take_while(u8::is_ascii_digit).count();
            let (prefix, number) = s.split_at(s.len() - digits);
            let n: u128 = if number.is_empty() {
                0
            } else {
                number.parse().ok()?
            };
            let by = by.to_u128()?;
            Some(CellValue::Text(format!(
                "{prefix}{:0digits$}",
                n.checked_add(by)?
            )))
        }
        _ => None,
    }
}

enum Sampler {
    Choice(Vec<CellValue>),
    Number {
        lo: i128,
        hi: i128,
        scale: u32,
    },
    Date {
        lo: NaiveDate,
        span: u64,
    },
    TextDate {
        lo: NaiveDate,
        span: u64,
        strftime: String,
    },
    TextRegex(rand_regex::Regex),
    Text {
        max_len: usize,
    },
    Boolean,
}

const ALNUM: &[u8] = b"ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789";

impl Sampler {
    fn new(spec: &ColumnSpec) -> Result<Self, GenerateError> {
        if let Some(values) = &spec.restricted_values {
            let ok: Vec<CellValue> = values
                .iter()
                .filter(|v| cell_violations(spec, v).is_empty())
                .cloned()
                .collect();
            if ok.is_empty() {
                return Err(unsatisfiable(spec, "no restricted value satisfies the spec"));
            }
            return Ok(Sampler::Choice(ok));
        }
        let range = spec.range.as_ref();
        Ok(match spec.data_type {
            DataType::Number => {
                let (min, max) = match range {
                    Some(r) => (
                        r.min.as_number().unwrap_or(Decimal::ZERO),
                        r.max.as_number().unwrap_or(Decimal::ZERO),
                    ),
                    None => (Decimal::ZERO, Decimal::new(999_999, 2)),
                };
                let scale = min.scale().max(max.scale());
                let factor = Decimal::from_i128_with_scale(10i128.pow(scale), 0);
                let lo = (min * factor).ceil().mantissa();
                let hi = (max * factor).floor().mantissa();
                if lo > hi {
                    return Err(unsatisfiable(spec, "empty numeric range"));
                }
                Sampler::Number { lo, hi, scale }
            }
            DataType::Date => {
                let (lo, span) = date_span(spec)?;
                Sampler::Date { lo, span }
            }
            DataType::Boolean => Sampler::Boolean,
            DataType::Text => match &spec.format {
                Some(FormatPattern::Date { strftime, .. }) => {
                    let (lo, span) = date_span(spec)?;
                    Sampler::TextDate {
                        lo,
                        span,
                        strftime: strftime.clone(),
                    }
                }
                Some(FormatPattern::Regex { source, .. }) => Sampler::TextRegex(
                    rand_regex::Regex::compile(source, 8)
                        .map_err(|e| unsatisfiable(spec, format!("cannot sample format: {e}")))?,
                ),
                None => Sampler::Text {
                    max_len: spec.max_size.unwrap_or(12).min(12),
                },
            },
        })
    }

    fn sample(&self, rng: &mut ChaCha8Rng) -> CellValue {
        match self {
            Sampler::Choice(values) => values.choose(rng).cloned().unwrap_or(CellValue::Null),
            Sampler::Number { lo, hi, scale } => {
                CellValue::Number(Decimal::from_i128_with_scale(rng.gen_range(*lo..=*hi), *scale))
            }
            Sampler::Date { lo, span } => {
                CellValue::Date(DateValue::date(*lo + Days::new(rng.gen_range(0..=*span))))
            }
            Sampler::TextDate { lo, span, strftime } => {
                let d = *lo + Days::new(rng.gen_range(0..=*span));
                CellValue::Text(d.format(strftime).to_string())
            }
            Sampler::TextRegex(re) => CellValue::Text(rng.sample(re)),
            Sampler::Text { max_len } => {
                let len = if *max_len == 0 {
                    0
                } else {
                    rng.gen_range(1..=*max_len)
                };
                CellValue::Text((0..len).map(|_| *ALNUM.choose(rng).unwrap() as char).collect())
            }
            Sampler::Boolean => CellValue::Boolean(rng.gen()),
        }
    }

    fn draw(&self, spec: &ColumnSpec, rng: &mut ChaCha8Rng) -> Result<CellValue, GenerateError> {
        for _ in 0..RETRIES {
            let value = self.sample(rng);
            if cell_violations(spec, &value).is_empty() {
                return Ok(value);
            }
        }
        Err(unsatisfiable(
            spec,
            format!("no valid value found in {RETRIES} draws"),
        ))
    }
}

fn date_span(spec: &ColumnSpec) -> Result<(NaiveDate, u64), GenerateError> {
    let (lo, hi) = match spec.range.as_ref().map(|r| (&r.min, &r.max)) {
        Some((CellValue::Date(a), CellValue::Date(b))) => {
            let lo = if a.time.is_some_and(|t| t > chrono::NaiveTime::MIN) {
                a.date.succ_opt().unwrap_or(a.date)
            } else {
                a.date
            };
            (lo, b.date)
        }
        _ => (
            NaiveDate::from_ymd_opt(2000, 1, 1).unwrap(),
            NaiveDate::from_ymd_opt(2029, 12, 31).unwrap(),
        ),
    };
    if lo > hi {
        return Err(unsatisfiable(spec, "empty date range"));
    }
    Ok((lo, (hi - lo).num_days() as u64))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::checks::check_validity;
    use rust_decimal_macros::dec;

    fn one(spec: ColumnSpec, rows: usize, fill: Option<Fill>) -> Result<Table, GenerateError> {
        let name = spec.name.clone();
        let schema = Schema::new("g").with_column(spec);
        let fills = fill.map(|f| BTreeMap::from([(name, f)])).unwrap_or_default();
        generate_table(&schema, rows, &fills, 7)
    }

    #[test]
    fn incremental_and_fixed() {
        let inc = Fill::Incremental {
            start: 1.into(),
            step: dec!(1),
        };
        let t = one(ColumnSpec::new("n", DataType::Number), 5, Some(inc)).unwrap();
        assert_eq!(
            t.columns()[0].cells,
            (1..=5).map(CellValue::from).collect::<Vec<_>>()
        );
        let t = one(
            ColumnSpec::new("n", DataType::Number),
            3,
            Some(Fill::Fixed(0.into())),
        )
        .unwrap();
        assert_eq!(t.columns()[0].cells, vec![CellValue::from(0); 3]);
    }

    #[test]
    fn text_and_date_increments() {
        assert_eq!(increment(&"INV-0099".into(), dec!(1), 1), Some("INV-0100".into()));
        let d = CellValue::Date(DateValue::ymd(2024, 2, 28).unwrap());
        assert_eq!(
            increment(&d, dec!(1), 2),
            Some(CellValue::Date(DateValue::ymd(2024, 3, 1).unwrap()))
        );
    }

    #[test]
    fn random_in_range_validates_and_replays() {
        let schema = Schema::new("g")
            .with_column(ColumnSpec::new("id", DataType::Number).primary_key())
            .with_column(ColumnSpec::new("amount", DataType::Number).with_range(dec!(0), dec!(100.00)))
            .with_column(
                ColumnSpec::new("code", DataType::Text)
                    .with_format("[A-Z]{3}-[0-9]{2}")
                    .with_max_size(6),
            )
            .with_column(ColumnSpec::new("when", DataType::Date))
            .with_column(ColumnSpec::new("day", DataType::Text).with_format("DD/MM/YYYY"))
            .with_column(ColumnSpec::new("kind", DataType::Text).with_values(["a", "b"]))
            .with_column(ColumnSpec::new("flag", DataType::Boolean));
        let a = generate_table(&schema, 10_000, &BTreeMap::new(), 42).unwrap();
        assert!(check_validity(&a, &schema).is_empty());
        assert_eq!(a, generate_table(&schema, 10_000, &BTreeMap::new(), 42).unwrap());
        assert_ne!(a, generate_table(&schema, 10_000, &BTreeMap::new(), 43).unwrap());
        assert_eq!(a.cell(9_999, 0), &CellValue::from(10_000));
        assert!(a.columns()[1].cells.iter().all(|c| c.precision() == Some(2)));
    }

    #[test]
    fn unsatisfiable_specs() {
        let mut empty = ColumnSpec::new("k", DataType::Text);
        empty.restricted_values = Some(vec![]);
        assert!(matches!(
            one(empty, 1, None),
            Err(GenerateError::UnsatisfiableSpec { .. })
        ));
        let fixed = Fill::Fixed(500.into());
        let ranged = ColumnSpec::new("n", DataType::Number).with_range(0, 100);
        assert!(one(ranged.clone(), 1, Some(fixed)).is_err());
        let inc = Fill::Incremental {
            start: 99.into(),
            step: dec!(1),
        };
        assert!(one(ranged, 3, Some(inc)).is_err());
    }
}
