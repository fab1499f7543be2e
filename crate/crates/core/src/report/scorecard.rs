use std::collections::{BTreeMap, BTreeSet, HashMap};

use num_rational::Ratio;
use rust_decimal::Decimal;
use serde::{Deserialize, Serialize};

use crate::checks::{Dimension, Finding};
use crate::model::Table;

/// `flagged / checked`, computed exactly and rounded half-up to 4 decimal
/// places. Zero when nothing was checked.
pub fn error_rate(flagged: u64, checked: u64) -> Decimal {
    if checked == 0 {
        return Decimal::ZERO;
    }
    let r = Ratio::new(u128::from(flagged) * 10_000, u128::from(checked));
    let rounded = (r + Ratio::new(1, 2)).to_integer();
    Decimal::from_i128_with_scale(rounded as i128, 4).normalize()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DimensionScore {
    pub dimension: Dimension,
    pub cells_checked: u64,
    /// Distinct cells addressed by this dimension's findings.
    pub cells_flagged: u64,
    pub rate: Decimal,
    pub findings: u64,
}

/// Per-dimension defect rates over the audited tables.
///
/// Every audited cell counts as checked for every automated dimension.
/// Findings about whole columns or tables count under `findings` but flag
/// no cells.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Scorecard {
    pub cells_checked: u64,
    pub cells_flagged: u64,
    pub overall_error_rate: Decimal,
    pub dimensions: Vec<DimensionScore>,
    /// Free-text notes for dimensions no check can measure.
    pub manual_dimensions: BTreeMap<String, String>,
}

pub const NOT_ASSESSED: &str = "not assessed";

type CellSet<'a> = BTreeSet<(&'a str, u32, u32)>;

pub fn build_scorecard(findings: &[Finding], tables: &[&Table]) -> Scorecard {
    let sizes: HashMap<&str, (u32, u32)> = tables
        .iter()
        .map(|t| (t.name(), (t.row_count() as u32, t.column_count() as u32)))
        .collect();
    let cells_checked: u64 = tables.iter().map(|t| t.cell_count() as u64).sum();
    let in_bounds = |sheet: &str, row: u32, col: u32| {
        sizes
            .get(sheet)
            .is_some_and(|&(r, c)| row >= 1 && row <= r && col >= 1 && col <= c)
    };
    let mut all: CellSet = BTreeSet::new();
    let mut per_dim: BTreeMap<Dimension, (CellSet, u64)> = BTreeMap::new();
    for f in findings {
        let entry = per_dim.entry(f.dimension).or_default();
        entry.1 += 1;
        for a in &f.addresses {
            if in_bounds(&a.sheet, a.row, a.column) {
                let key = (a.sheet.as_str(), a.row, a.column);
                entry.0.insert(key);
                all.insert(key);
            }
        }
    }
    let dimensions = Dimension::ALL
        .iter()
        .filter(|d| !Dimension::MANUAL.contains(d) || per_dim.contains_key(d))
        .map(|&d| {
            let (cells, count) = per_dim.get(&d).map_or((0, 0), |(s, n)| (s.len() as u64, *n));
            DimensionScore {
                dimension: d,
                cells_checked,
                cells_flagged: cells,
                rate: error_rate(cells, cells_checked),
                findings: count,
            }
        })
        .collect();
    let manual_dimensions = Dimension::MANUAL
        .iter()
        .map(|d| (d.name().to_string(), NOT_ASSESSED.to_string()))
        .collect();
    Scorecard {
        cells_checked,
        cells_flagged: all.len() as u64,
        overall_error_rate: error_rate(all.len() as u64, cells_checked),
        dimensions,
        manual_dimensions,
    }
}

impl Scorecard {
    pub fn dimension(&self, d: Dimension) -> Option<&DimensionScore> {
        self.dimensions.iter().find(|s| s.dimension == d)
    }

    /// Records a reviewer's note for a non-computable dimension.
    pub fn annotate(&mut self, dimension: Dimension, note: impl Into<String>) {
        self.manual_dimensions
            .insert(dimension.name().to_string(), note.into());
    }
}
