use std::collections::HashSet;
use std::fmt;

use rand::distributions::{Distribution, WeightedIndex};
use rand::Rng;
use rust_decimal::Decimal;
use serde::{Deserialize, Serialize};

use super::{rng_for, GenerateError};
use crate::model::{CellAddress, CellValue, DateValue, FormatPattern, Schema, Table};

/// Classes of keying and handling mistakes.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "param", rename_all = "kebab-case")]
pub enum ErrorKind {
    /// Swap one pair of adjacent, different digits: 1234 → 1243.
    TransposeDigits,
    /// Move the decimal point `power` places right (negative: left): 1234.5 → 12345.
    DecimalShift(i32),
    /// Multiply by a unit factor: 9159 → 9159000.
    UnitScale(Decimal),
    /// Replace a value with Null.
    BlankOut,
    /// Overwrite a row with a copy of another row.
    DuplicateRow,
    /// Push a number or date outside its declared range.
    OutOfRange,
    /// Replace a value with text in the wrong layout.
    FormatCorrupt,
}

impl ErrorKind {
    pub fn validate(&self) -> Result<(), String> {
        match self {
            ErrorKind::DecimalShift(0) => Err("decimal-shift power must be nonzero".into()),
            ErrorKind::UnitScale(f) if f.is_zero() || *f == Decimal::ONE => {
                Err("unit-scale factor cannot be 0 or 1".into())
            }
            _ => Ok(()),
        }
    }
}

impl fmt::Display for ErrorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ErrorKind::TransposeDigits => f.write_str("transpose-digits"),
            ErrorKind::DecimalShift(p) => write!(f, "decimal-shift:{p:+}"),
            ErrorKind::UnitScale(x) => write!(f, "unit-scale:{x}"),
            ErrorKind::BlankOut => f.write_str("blank-out"),
            ErrorKind::DuplicateRow => f.write_str("duplicate-row"),
            ErrorKind::OutOfRange => f.write_str("out-of-range"),
            ErrorKind::FormatCorrupt => f.write_str("format-corrupt"),
        }
    }
}

impl std::str::FromStr for ErrorKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (name, param) = match s.split_once(':') {
            Some((n, p)) => (n.trim(), Some(p.trim())),
            None => (s.trim(), None),
        };
        let kind = match (name, param) {
            ("transpose-digits" | "transpose", None) => ErrorKind::TransposeDigits,
            ("decimal-shift", Some(p)) => ErrorKind::DecimalShift(
                p.trim_start_matches('+')
                    .parse()
                    .map_err(|_| format!("bad decimal-shift power `{p}`"))?,
            ),
            ("unit-scale", Some(p)) => {
                ErrorKind::UnitScale(p.parse().map_err(|_| format!("bad unit-scale factor `{p}`"))?)
            }
            ("blank-out" | "blank", None) => ErrorKind::BlankOut,
            ("duplicate-row", None) => ErrorKind::DuplicateRow,
            ("out-of-range", None) => ErrorKind::OutOfRange,
            ("format-corrupt", None) => ErrorKind::FormatCorrupt,
            _ => return Err(format!("unknown error kind `{s}`")),
        };
        kind.validate()?;
        Ok(kind)
    }
}

/// Parses `kind[=weight],…`, e.g. `transpose-digits=2,decimal-shift:+1,blank-out`.
/// Weights default to 1.
pub fn parse_weighted_kinds(text: &str) -> Result<Vec<(ErrorKind, f64)>, String> {
    text.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|item| {
            let (kind, weight) = match item.split_once('=') {
                Some((k, w)) => (
                    k,
                    w.trim()
                        .parse::<f64>()
                        .map_err(|_| format!("bad weight in `{item}`"))?,
                ),
                None => (item, 1.0),
            };
            Ok((kind.parse()?, weight))
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "target", rename_all = "lowercase")]
pub enum InjectionTarget {
    Cell {
        address: CellAddress,
        original: CellValue,
        corrupted: CellValue,
    },
    /// `row` (1-based) was overwritten with the contents of `source_row`.
    Row {
        sheet: String,
        row: u32,
        source_row: u32,
        original: Vec<CellValue>,
        corrupted: Vec<CellValue>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Injection {
    #[serde(flatten)]
    pub kind: ErrorKind,
    #[serde(flatten)]
    pub target: InjectionTarget,
}

impl Injection {
    /// 0-based row touched by this injection.
    pub fn row_index(&self) -> usize {
        match &self.target {
            InjectionTarget::Cell { address, .. } => address.row as usize - 1,
            InjectionTarget::Row { row, .. } => *row as usize - 1,
        }
    }
}

/// Ground truth for one injection run, ordered by position.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InjectionLog {
    pub seed: u64,
    pub rate: f64,
    pub entries: Vec<Injection>,
}

impl InjectionLog {
    pub fn count(&self, kind: &ErrorKind) -> usize {
        self.entries.iter().filter(|e| &e.kind == kind).count()
    }
}

/// Corrupts `⌈rate × eligible cells⌉` targets without replacement, where a
/// cell is eligible when at least one requested kind applies to it. Each
/// corruption picks a kind by weight among kinds that still have targets,
/// then a target uniformly. A touched cell is never touched again, and a
/// duplicated row is excluded from all further picks. Stops early when
/// every kind runs out.
///
/// `OutOfRange` and `FormatCorrupt` read ranges and formats from `schema`;
/// without a schema only dates and numbers are eligible for `FormatCorrupt`
/// and `OutOfRange` never applies.
pub fn inject_errors(
    table: &Table,
    rate: f64,
    kinds: &[(ErrorKind, f64)],
    seed: u64,
    schema: Option<&Schema>,
) -> Result<(Table, InjectionLog), GenerateError> {
    if !(rate > 0.0 && rate <= 1.0) {
        return Err(GenerateError::BadConfig(format!(
            "rate must be in (0, 1], got {rate}"
        )));
    }
    if kinds.is_empty() || kinds.iter().any(|(_, w)| !(*w > 0.0 && w.is_finite())) {
        return Err(GenerateError::BadConfig(
            "kinds need positive finite weights".into(),
        ));
    }
    for (k, _) in kinds {
        k.validate().map_err(GenerateError::BadConfig)?;
    }
    if table.row_count() == 0 || table.column_count() == 0 {
        return Err(GenerateError::NothingEligible);
    }
    let shift_selected = kinds.iter().any(|(k, _)| matches!(k, ErrorKind::DecimalShift(_)));
    let ctx = Context {
        table,
        schema,
        shift_selected,
    };

    // Eligible targets per kind, as (row, col); DuplicateRow uses col = usize::MAX.
    let mut pools: Vec<Vec<(usize, usize)>> = kinds.iter().map(|_| Vec::new()).collect();
    let mut eligible_cells = 0usize;
    let dup_rows = table.row_count() >= 2;
    for col in 0..table.column_count() {
        for row in 0..table.row_count() {
            let mut any = false;
            for (k, (kind, _)) in kinds.iter().enumerate() {
                if *kind == ErrorKind::DuplicateRow {
                    any |= dup_rows;
                } else if ctx.applies(kind, row, col) {
                    pools[k].push((row, col));
                    any = true;
                }
            }
            eligible_cells += usize::from(any);
        }
    }
    for (k, (kind, _)) in kinds.iter().enumerate() {
        if *kind == ErrorKind::DuplicateRow && dup_rows {
            pools[k] = (0..table.row_count()).map(|r| (r, usize::MAX)).collect();
        }
    }
    if eligible_cells == 0 {
        return Err(GenerateError::NothingEligible);
    }
    let target = ((rate * eligible_cells as f64).ceil() as usize).min(eligible_cells);

    let mut rng = rng_for(seed, 0);
    let mut out = table.clone();
    let mut used_cells: HashSet<(usize, usize)> = HashSet::new();
    let mut used_rows: HashSet<usize> = HashSet::new();
    let mut rows_with_cells: HashSet<usize> = HashSet::new();
    let mut entries = Vec::new();
    while entries.len() < target {
        let weights: Vec<f64> = kinds
            .iter()
            .zip(&pools)
            .map(|((_, w), p)| if p.is_empty() { 0.0 } else { *w })
            .collect();
        let Ok(dist) = WeightedIndex::new(&weights) else {
            break;
        };
        let k = dist.sample(&mut rng);
        let pool = &mut pools[k];
        let pick = rng.gen_range(0..pool.len());
        let (row, col) = pool.swap_remove(pick);
        let kind = &kinds[k].0;
        if used_rows.contains(&row) {
            continue;
        }
        if *kind == ErrorKind::DuplicateRow {
            if rows_with_cells.contains(&row) {
                continue;
            }
            let candidates: Vec<usize> = (0..table.row_count())
                .filter(|&s| s != row && table.row(s) != table.row(row))
                .collect();
            if candidates.is_empty() {
                continue;
            }
            let source = candidates[rng.gen_range(0..candidates.len())];
            let original = table.row_cloned(row);
            let corrupted = table.row_cloned(source);
            for (c, v) in corrupted.iter().enumerate() {
                out.set_cell(row, c, v.clone());
            }
            used_rows.insert(row);
            entries.push(Injection {
                kind: kind.clone(),
                target: InjectionTarget::Row {
                    sheet: table.name().to_string(),
                    row: row as u32 + 1,
                    source_row: source as u32 + 1,
                    original,
                    corrupted,
                },
            });
            continue;
        }
        if !used_cells.insert((row, col)) {
            continue;
        }
        rows_with_cells.insert(row);
        let original = table.cell(row, col).clone();
        let Some(corrupted) = ctx.corrupt(kind, row, col, &mut rng) else {
            continue;
        };
        debug_assert_ne!(corrupted, original);
        out.set_cell(row, col, corrupted.clone());
        entries.push(Injection {
            kind: kind.clone(),
            target: InjectionTarget::Cell {
                address: table.address(row, col),
                original,
                corrupted,
            },
        });
    }
    entries.sort_by_key(|e| match &e.target {
        InjectionTarget::Cell { address, .. } => (address.row, address.column),
        InjectionTarget::Row { row, .. } => (*row, 0),
    });
    Ok((out, InjectionLog { seed, rate, entries }))
}

struct Context<'a> {
    table: &'a Table,
    schema: Option<&'a Schema>,
    shift_selected: bool,
}

impl Context<'_> {
    fn spec(&self, col: usize) -> Option<&crate::model::ColumnSpec> {
        self.schema?.spec(&self.table.columns()[col].name)
    }

    fn applies(&self, kind: &ErrorKind, row: usize, col: usize) -> bool {
        let cell = self.table.cell(row, col);
        match kind {
            ErrorKind::TransposeDigits => match cell {
                CellValue::Number(d) => !transposable_pairs(*d, self.shift_selected).is_empty(),
                _ => false,
            },
            ErrorKind::DecimalShift(p) => match cell {
                CellValue::Number(d) => shift(*d, *p).is_some_and(|v| v != *d),
                _ => false,
            },
            ErrorKind::UnitScale(f) => match cell {
                CellValue::Number(d) => d.checked_mul(*f).is_some_and(|v| v != *d),
                _ => false,
            },
            ErrorKind::BlankOut => !cell.is_null(),
            ErrorKind::DuplicateRow => false,
            ErrorKind::OutOfRange => {
                !cell.is_null()
                    && self
                        .spec(col)
                        .and_then(|s| s.range.as_ref())
                        .is_some_and(|r| cell.data_type() == r.min.data_type())
            }
            ErrorKind::FormatCorrupt => self.misformat(row, col).is_some(),
        }
    }

    fn corrupt(&self, kind: &ErrorKind, row: usize, col: usize, rng: &mut impl Rng) -> Option<CellValue> {
        let cell = self.table.cell(row, col);
        match kind {
            ErrorKind::TransposeDigits => {
                let d = cell.as_number()?;
                let pairs = transposable_pairs(d, self.shift_selected);
                let i = pairs[rng.gen_range(0..pairs.len())];
                Some(CellValue::Number(swap_digits(d, i)))
            }
            ErrorKind::DecimalShift(p) => shift(cell.as_number()?, *p).map(CellValue::Number),
            ErrorKind::UnitScale(f) => cell.as_number()?.checked_mul(*f).map(CellValue::Number),
            ErrorKind::BlankOut => Some(CellValue::Null),
            ErrorKind::DuplicateRow => None,
            ErrorKind::OutOfRange => {
                let range = self.spec(col)?.range.as_ref()?;
                let above = rng.gen_bool(0.5);
                let v = outside(&range.min, &range.max, above, rng)?;
                (v != *cell).then_some(v)
            }
            ErrorKind::FormatCorrupt => self.misformat(row, col),
        }
    }

    /// A text rendering of the cell that breaks its expected layout.
    fn misformat(&self, row: usize, col: usize) -> Option<CellValue> {
        let cell = self.table.cell(row, col);
        let format = self.spec(col).and_then(|s| s.format.as_ref());
        let text = match cell {
            CellValue::Date(dv) => {
                let layout = match format {
                    Some(FormatPattern::Date { strftime, .. }) if strftime == "%d.%m.%Y" => "%Y/%m/%d",
                    _ => "%d.%m.%Y",
                };
                dv.date.format(layout).to_string()
            }
            CellValue::Number(d) => {
                let s = d.to_string();
                let (from, to) = [('0', 'O'), ('1', 'l'), ('5', 'S'), ('8', 'B')]
                    .into_iter()
                    .find(|(from, _)| s.contains(*from))?;
                s.replacen(from, &to.to_string(), 1)
            }
            CellValue::Text(s) => {
                let fmt = format?;
                [format!("{s}#"), format!("#{s}")]
                    .into_iter()
                    .find(|t| !fmt.matches(t))?
            }
            _ => return None,
        };
        Some(CellValue::Text(text))
    }
}

/// Indices `i` such that digits `i` and `i+1` of the mantissa differ. A
/// pair straddling the decimal point is left out when decimal shifts are
/// also being injected, so the two error classes stay distinct.
fn transposable_pairs(d: Decimal, shift_selected: bool) -> Vec<usize> {
    let digits = d.mantissa().unsigned_abs().to_string().into_bytes();
    let int_len = digits.len() as i64 - i64::from(d.scale());
    (0..digits.len().saturating_sub(1))
        .filter(|&i| digits[i] != digits[i + 1])
        .filter(|&i| !(shift_selected && i as i64 + 1 == int_len))
        .collect()
}

fn swap_digits(d: Decimal, i: usize) -> Decimal {
    let mut digits = d.mantissa().unsigned_abs().to_string().into_bytes();
    digits.swap(i, i + 1);
    let m: i128 = std::str::from_utf8(&digits).unwrap().parse().unwrap();
    let m = if d.is_sign_negative() { -m } else { m };
    Decimal::from_i128_with_scale(m, d.scale())
}

/// Moves the decimal point, keeping the digit string: 1234.5 → 12345 for +1.
fn shift(d: Decimal, power: i32) -> Option<Decimal> {
    if d.is_zero() {
        return None;
    }
    let scale = i64::from(d.scale()) - i64::from(power);
    if scale >= 0 {
        let scale = u32::try_from(scale).ok().filter(|s| *s <= 28)?;
        Decimal::try_from_i128_with_scale(d.mantissa(), scale).ok()
    } else {
        let factor = 10i128.checked_pow(u32::try_from(-scale).ok()?)?;
        Decimal::try_from_i128_with_scale(d.mantissa().checked_mul(factor)?, 0).ok()
    }
}

fn outside(min: &CellValue, max: &CellValue, above: bool, rng: &mut impl Rng) -> Option<CellValue> {
    match (min, max) {
        (CellValue::Number(lo), CellValue::Number(hi)) => {
            let scale = lo.scale().max(hi.scale());
            let unit = Decimal::new(1, scale);
            let width = (hi - lo).max(unit);
            let steps = (width / unit).floor();
            use num_traits::ToPrimitive;
            let k = rng.gen_range(1..=steps.to_i64().unwrap_or(1).clamp(1, 1_000_000));
            let by = unit * Decimal::from(k);
            if above {
                hi.checked_add(by)
            } else {
                lo.checked_sub(by)
            }
            .map(CellValue::Number)
        }
        (CellValue::Date(lo), CellValue::Date(hi)) => {
            let days = rng.gen_range(1..=3650u64);
            let date = if above {
                hi.date.checked_add_days(chrono::Days::new(days))?
            } else {
                lo.date.checked_sub_days(chrono::Days::new(days))?
            };
            Some(CellValue::Date(DateValue::date(date)))
        }
        _ => None,
    }
}
