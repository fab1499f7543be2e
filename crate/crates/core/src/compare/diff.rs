use std::collections::HashMap;

use rust_decimal::Decimal;
use serde::Serialize;

use super::{align_by_sequence, key_text, resolve, CompareError};
use crate::model::{CellAddress, CellValue, Table};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "mode", content = "columns", rename_all = "lowercase")]
pub enum AlignMode {
    Position,
    Key(Vec<String>),
    Sequence,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct DiffOptions {
    /// Compare text ignoring ASCII and Unicode case.
    pub ignore_case: bool,
    /// Compare text after trimming surrounding whitespace.
    pub trim: bool,
    /// Numbers within this distance count as equal.
    pub epsilon: Option<Decimal>,
}

/// One differing cell. The address is in the left table; `numeric_delta`
/// is `right − left`, present only when both sides are Numbers.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CellDiff {
    pub address: CellAddress,
    pub right_address: CellAddress,
    pub left: CellValue,
    pub right: CellValue,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub numeric_delta: Option<Decimal>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DiffResult {
    pub aligned_by: AlignMode,
    pub cell_diffs: Vec<CellDiff>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub shape_diff: Option<String>,
    /// Columns present on one side only (key mode).
    pub left_only_columns: Vec<String>,
    pub right_only_columns: Vec<String>,
    /// Unmatched 0-based rows (key and sequence modes).
    pub left_only_rows: Vec<usize>,
    pub right_only_rows: Vec<usize>,
}

impl DiffResult {
    fn new(aligned_by: AlignMode, left: &Table, right: &Table) -> Self {
        let shape_diff = (left.row_count() != right.row_count()
            || left.column_count() != right.column_count())
        .then(|| {
            format!(
                "{} is {}x{}, {} is {}x{}",
                left.name(),
                left.row_count(),
                left.column_count(),
                right.name(),
                right.row_count(),
                right.column_count()
            )
        });
        Self {
            aligned_by,
            cell_diffs: Vec::new(),
            shape_diff,
            left_only_columns: Vec::new(),
            right_only_columns: Vec::new(),
            left_only_rows: Vec::new(),
            right_only_rows: Vec::new(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.cell_diffs.is_empty()
            && self.shape_diff.is_none()
            && self.left_only_columns.is_empty()
            && self.right_only_columns.is_empty()
            && self.left_only_rows.is_empty()
            && self.right_only_rows.is_empty()
    }

    /// Line-per-difference text, A1 addresses.
    pub fn render_text(&self) -> String {
        let mut out = String::new();
        if let Some(s) = &self.shape_diff {
            out.push_str(&format!("shape: {s}\n"));
        }
        for c in &self.left_only_columns {
            out.push_str(&format!("column only in left: {c}\n"));
        }
        for c in &self.right_only_columns {
            out.push_str(&format!("column only in right: {c}\n"));
        }
        for r in &self.left_only_rows {
            out.push_str(&format!("row only in left: {}\n", r + 1));
        }
        for r in &self.right_only_rows {
            out.push_str(&format!("row only in right: {}\n", r + 1));
        }
        for d in &self.cell_diffs {
            let delta = d
                .numeric_delta
                .map(|x| format!(" (delta {x})"))
                .unwrap_or_default();
            out.push_str(&format!("{}: `{}` -> `{}`{delta}\n", d.address, d.left, d.right));
        }
        out.push_str(&format!("{} cell difference(s)\n", self.cell_diffs.len()));
        out
    }
}

impl DiffOptions {
    fn text<'a>(&self, s: &'a str) -> std::borrow::Cow<'a, str> {
        let s = if self.trim { s.trim() } else { s };
        if self.ignore_case {
            s.to_lowercase().into()
        } else {
            s.into()
        }
    }

    /// `None` when the cells count as equal, else the diff's numeric delta.
    fn compare(&self, left: &CellValue, right: &CellValue) -> Option<Option<Decimal>> {
        match (left, right) {
            (CellValue::Number(l), CellValue::Number(r)) => {
                let delta = r - l;
                let equal = match self.epsilon {
                    Some(eps) => delta.abs() <= eps,
                    None => delta.is_zero(),
                };
                (!equal).then_some(Some(delta))
            }
            (CellValue::Text(l), CellValue::Text(r)) => (self.text(l) != self.text(r)).then_some(None),
            _ => (left != right).then_some(None),
        }
    }
}

/// Cell-level comparison in the spirit of pasting one sheet onto another
/// with "subtract": numbers report their exact difference when nonzero,
/// everything else reports on inequality.
pub fn diff_tables(
    left: &Table,
    right: &Table,
    mode: &AlignMode,
    opts: &DiffOptions,
) -> Result<DiffResult, CompareError> {
    let mut result = DiffResult::new(mode.clone(), left, right);
    match mode {
        AlignMode::Position => {
            if result.shape_diff.is_some() {
                return Err(CompareError::ShapeMismatch {
                    left_rows: left.row_count(),
                    left_cols: left.column_count(),
                    right_rows: right.row_count(),
                    right_cols: right.column_count(),
                });
            }
            let columns: Vec<(usize, usize)> = (0..left.column_count()).map(|c| (c, c)).collect();
            for r in 0..left.row_count() {
                diff_row(left, right, r, r, &columns, opts, &mut result.cell_diffs);
            }
        }
        AlignMode::Key(keys) => {
            let lk = resolve(left, keys)?;
            let rk = resolve(right, keys)?;
            let right_index = key_index(right, &rk)?;
            key_index(left, &lk)?;
            let mut columns = Vec::new();
            for (lc, name) in left.headers().enumerate() {
                match right.column_index(name) {
                    Some(rc) => columns.push((lc, rc)),
                    None => result.left_only_columns.push(name.to_string()),
                }
            }
            result.right_only_columns = right
                .headers()
                .filter(|n| left.column_index(n).is_none())
                .map(str::to_string)
                .collect();
            let mut matched = vec![false; right.row_count()];
            for r in 0..left.row_count() {
                let key: Vec<&CellValue> = lk.iter().map(|&c| left.cell(r, c)).collect();
                match right_index.get(&key) {
                    Some(&rr) => {
                        matched[rr] = true;
                        diff_row(left, right, r, rr, &columns, opts, &mut result.cell_diffs);
                    }
                    None => result.left_only_rows.push(r),
                }
            }
            result.right_only_rows = (0..right.row_count()).filter(|&r| !matched[r]).collect();
        }
        AlignMode::Sequence => {
            let width = left.column_count().min(right.column_count());
            let columns: Vec<(usize, usize)> = (0..width).map(|c| (c, c)).collect();
            let alignment = align_by_sequence(left, right);
            // Between consecutive matched rows, unmatched rows on both sides
            // are treated as edits of each other, paired in order.
            let mut anchors = alignment.pairs.clone();
            anchors.push((left.row_count(), right.row_count()));
            let (mut i, mut j) = (0, 0);
            for (pi, pj) in anchors {
                let (dels, ins) = (pi - i, pj - j);
                for k in 0..dels.min(ins) {
                    diff_row(left, right, i + k, j + k, &columns, opts, &mut result.cell_diffs);
                }
                result.left_only_rows.extend(i + ins.min(dels)..pi);
                result.right_only_rows.extend(j + ins.min(dels)..pj);
                i = pi + 1;
                j = pj + 1;
            }
        }
    }
    Ok(result)
}

fn key_index<'t>(
    table: &'t Table,
    key_cols: &[usize],
) -> Result<HashMap<Vec<&'t CellValue>, usize>, CompareError> {
    let mut index = HashMap::with_capacity(table.row_count());
    for r in 0..table.row_count() {
        let key: Vec<&CellValue> = key_cols.iter().map(|&c| table.cell(r, c)).collect();
        if index.contains_key(&key) {
            return Err(CompareError::DuplicateKey {
                table: table.name().to_string(),
                key: key_text(&key),
            });
        }
        index.insert(key, r);
    }
    Ok(index)
}

fn diff_row(
    left: &Table,
    right: &Table,
    lr: usize,
    rr: usize,
    columns: &[(usize, usize)],
    opts: &DiffOptions,
    out: &mut Vec<CellDiff>,
) {
    for &(lc, rc) in columns {
        let (l, r) = (left.cell(lr, lc), right.cell(rr, rc));
        if let Some(numeric_delta) = opts.compare(l, r) {
            out.push(CellDiff {
                address: left.address(lr, lc),
                right_address: right.address(rr, rc),
                left: l.clone(),
                right: r.clone(),
                numeric_delta,
            });
        }
    }
}
