use rust_decimal::Decimal;
use serde::{Deserialize, Serialize};

use super::AnalyticsError;
use crate::checks::Finding;
use crate::model::{CellValue, Column, Table};

/// χ² critical value for 8 degrees of freedom at α = 0.05.
pub const BENFORD_CRITICAL: f64 = 15.507;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenfordResult {
    /// Counts for leading digits 1 through 9.
    pub observed: [u64; 9],
    /// `log10(1 + 1/d)` for d in 1..=9.
    pub expected: [f64; 9],
    pub sample_size: u64,
    pub chi_square: f64,
    /// Mean absolute deviation between observed and expected proportions.
    pub mad: f64,
    pub flagged: bool,
    /// Set when the sample is smaller than the requested minimum.
    pub insufficient_sample: bool,
}

impl BenfordResult {
    pub fn proportion(&self, digit: usize) -> f64 {
        if self.sample_size == 0 {
            0.0
        } else {
            self.observed[digit - 1] as f64 / self.sample_size as f64
        }
    }
}

pub fn expected_proportions() -> [f64; 9] {
    std::array::from_fn(|i| (1.0 + 1.0 / (i as f64 + 1.0)).log10())
}

/// First nonzero decimal digit of the absolute value; `None` for zero.
/// Magnitude is ignored, so 0.00456, 4.56 and 4560 all give 4.
pub fn leading_digit(value: Decimal) -> Option<u8> {
    let mut m = value.mantissa().unsigned_abs();
    if m == 0 {
        return None;
    }
    while m >= 10 {
        m /= 10;
    }
    Some(m as u8)
}

/// First-digit test over the nonzero Numbers of a column. Every non-Null
/// cell must be a Number.
pub fn benford(column: &Column, min_sample: usize) -> Result<BenfordResult, AnalyticsError> {
    let mut observed = [0u64; 9];
    for (_, cell) in column.non_null() {
        let CellValue::Number(d) = cell else {
            return Err(AnalyticsError::NotNumeric {
                column: column.name.clone(),
            });
        };
        if let Some(digit) = leading_digit(*d) {
            observed[usize::from(digit) - 1] += 1;
        }
    }
    let expected = expected_proportions();
    let n: u64 = observed.iter().sum();
    let (mut chi_square, mut mad) = (0.0, 0.0);
    if n > 0 {
        let nf = n as f64;
        for (obs, p) in observed.iter().zip(expected) {
            let e = p * nf;
            chi_square += (*obs as f64 - e).powi(2) / e;
            mad += (*obs as f64 / nf - p).abs();
        }
        mad /= 9.0;
    }
    let insufficient_sample = n < min_sample as u64;
    Ok(BenfordResult {
        observed,
        expected,
        sample_size: n,
        chi_square,
        mad,
        flagged: !insufficient_sample && chi_square > BENFORD_CRITICAL,
        insufficient_sample,
    })
}

/// A column-level finding when the result is flagged.
pub fn benford_finding(table: &Table, col: usize, result: &BenfordResult) -> Option<Finding> {
    result.flagged.then(|| {
        Finding::new(
            table.name(),
            "benford",
            format!(
                "`{}` leading digits deviate from Benford's law (chi-square {:.3} > {}, n = {}, MAD {:.4})",
                table.columns()[col].name,
                result.chi_square,
                BENFORD_CRITICAL,
                result.sample_size,
                result.mad
            ),
        )
        .on_columns([col as u32 + 1])
    })
}
