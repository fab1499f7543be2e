use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use rust_decimal::Decimal;

use super::AnalyticsError;
use crate::model::{compare_values, CellValue, Column, ValueOrdering};

/// Profile of one column.
#[derive(Debug, Clone, PartialEq)]
pub struct StatsSummary {
    pub count: usize,
    pub null_count: usize,
    pub min: Option<CellValue>,
    pub max: Option<CellValue>,
    /// Exact sum and mean; present only when every non-Null cell is a Number.
    pub sum: Option<Decimal>,
    pub mean: Option<BigRational>,
    /// The k largest distinct values, largest first, with their counts.
    pub top_k: Vec<(CellValue, usize)>,
    /// The k smallest distinct values, smallest first.
    pub bottom_k: Vec<(CellValue, usize)>,
    pub frequency: BTreeMap<CellValue, usize>,
}

impl StatsSummary {
    pub fn non_null(&self) -> usize {
        self.count - self.null_count
    }

    /// Mean rounded half away from zero to `dp` fractional digits.
    pub fn mean_decimal(&self, dp: u32) -> Option<Decimal> {
        self.mean.as_ref().and_then(|m| rational_to_decimal(m, dp))
    }
}

pub(crate) fn decimal_to_rational(d: Decimal) -> BigRational {
    BigRational::new(BigInt::from(d.mantissa()), BigInt::from(10).pow(d.scale()))
}

/// Rounds half away from zero to `dp` fractional digits; `None` when the
/// result does not fit a [`Decimal`].
pub fn rational_to_decimal(r: &BigRational, dp: u32) -> Option<Decimal> {
    let scaled = (r * BigInt::from(10).pow(dp)).round().to_integer();
    Decimal::try_from_i128_with_scale(scaled.to_i128()?, dp).ok()
}

pub fn descriptive_stats(column: &Column, k: usize) -> StatsSummary {
    let mut frequency: BTreeMap<CellValue, usize> = BTreeMap::new();
    let mut null_count = 0;
    let mut all_numbers = true;
    let mut sum = BigRational::zero();
    for cell in &column.cells {
        match cell {
            CellValue::Null => {
                null_count += 1;
                continue;
            }
            CellValue::Number(d) if all_numbers => sum += decimal_to_rational(*d),
            CellValue::Number(_) => {}
            _ => all_numbers = false,
        }
        *frequency.entry(cell.clone()).or_default() += 1;
    }
    let non_null = column.len() - null_count;
    let numeric = all_numbers && non_null > 0;
    let mean = numeric.then(|| &sum / BigInt::from(non_null));
    let sum = if numeric {
        rational_to_decimal(&sum, 28.min(max_scale(&frequency)))
    } else {
        None
    };
    StatsSummary {
        count: column.len(),
        null_count,
        min: frequency.keys().next().cloned(),
        max: frequency.keys().next_back().cloned(),
        sum,
        mean,
        top_k: frequency
            .iter()
            .rev()
            .take(k)
            .map(|(v, c)| (v.clone(), *c))
            .collect(),
        bottom_k: frequency.iter().take(k).map(|(v, c)| (v.clone(), *c)).collect(),
        frequency,
    }
}

fn max_scale(frequency: &BTreeMap<CellValue, usize>) -> u32 {
    frequency
        .keys()
        .filter_map(|v| v.as_number().map(|d| d.scale()))
        .max()
        .unwrap_or(0)
}

/// Half-open interval `[lower, upper)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Band {
    pub lower: CellValue,
    pub upper: CellValue,
}

impl Band {
    pub fn new(lower: impl Into<CellValue>, upper: impl Into<CellValue>) -> Self {
        Self {
            lower: lower.into(),
            upper: upper.into(),
        }
    }

    pub fn contains(&self, value: &CellValue) -> bool {
        matches!(
            compare_values(value, &self.lower),
            ValueOrdering::Greater | ValueOrdering::Equal
        ) && compare_values(value, &self.upper) == ValueOrdering::Less
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Strata {
    pub counts: Vec<usize>,
    pub out_of_band: usize,
    /// Non-Null values of a different type than the bands.
    pub incomparable: usize,
}

/// Counts values per band. Bands may be numbers or dates.
pub fn stratify(column: &Column, bands: &[Band]) -> Result<Strata, AnalyticsError> {
    for (i, b) in bands.iter().enumerate() {
        if compare_values(&b.lower, &b.upper) != ValueOrdering::Less {
            return Err(AnalyticsError::BadBands(format!(
                "band {} [{}, {}) is empty or not comparable",
                i + 1,
                b.lower,
                b.upper
            )));
        }
        if let Some(next) = bands.get(i + 1) {
            if !matches!(
                compare_values(&b.upper, &next.lower),
                ValueOrdering::Less | ValueOrdering::Equal
            ) {
                return Err(AnalyticsError::BadBands(format!(
                    "band {} overlaps or precedes band {}",
                    i + 2,
                    i + 1
                )));
            }
        }
    }
    let mut strata = Strata {
        counts: vec![0; bands.len()],
        out_of_band: 0,
        incomparable: 0,
    };
    for (_, value) in column.non_null() {
        if let Some(first) = bands.first() {
            if compare_values(value, &first.lower) == ValueOrdering::Incomparable {
                strata.incomparable += 1;
                continue;
            }
        }
        match bands.iter().position(|b| b.contains(value)) {
            Some(i) => strata.counts[i] += 1,
            None => strata.out_of_band += 1,
        }
    }
    Ok(strata)
}

/// Pair counts; Null is its own key.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct CrossTab {
    pub counts: BTreeMap<(CellValue, CellValue), usize>,
}

impl CrossTab {
    pub fn get(&self, a: &CellValue, b: &CellValue) -> usize {
        self.counts.get(&(a.clone(), b.clone())).copied().unwrap_or(0)
    }

    pub fn row_keys(&self) -> Vec<&CellValue> {
        let mut keys: Vec<_> = self.counts.keys().map(|(a, _)| a).collect();
        keys.dedup();
        keys
    }

    pub fn column_keys(&self) -> Vec<&CellValue> {
        let mut keys: Vec<_> = self.counts.keys().map(|(_, b)| b).collect();
        keys.sort();
        keys.dedup();
        keys
    }
}

pub fn cross_tabulate(col_a: &Column, col_b: &Column) -> Result<CrossTab, AnalyticsError> {
    if col_a.len() != col_b.len() {
        return Err(AnalyticsError::LengthMismatch {
            left: col_a.len(),
            right: col_b.len(),
        });
    }
    let mut tab = CrossTab::default();
    for (a, b) in col_a.cells.iter().zip(&col_b.cells) {
        *tab.counts.entry((a.clone(), b.clone())).or_default() += 1;
    }
    Ok(tab)
}
