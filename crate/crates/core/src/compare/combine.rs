use std::collections::{BTreeSet, HashMap, HashSet};

use super::{key_text, resolve, CompareError};
use crate::model::{CellValue, Column, Table};

/// Distinct non-Null values split by which column holds them.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Membership {
    pub in_both: BTreeSet<CellValue>,
    pub only_a: BTreeSet<CellValue>,
    pub only_b: BTreeSet<CellValue>,
}

pub fn set_membership(col_a: &Column, col_b: &Column) -> Membership {
    let a: BTreeSet<CellValue> = col_a.non_null().map(|(_, v)| v.clone()).collect();
    let b: BTreeSet<CellValue> = col_b.non_null().map(|(_, v)| v.clone()).collect();
    Membership {
        in_both: a.intersection(&b).cloned().collect(),
        only_a: a.difference(&b).cloned().collect(),
        only_b: b.difference(&a).cloned().collect(),
    }
}

/// Keeps the first row for each distinct key (all columns when `columns` is
/// empty), preserving order.
pub fn extract_unique(table: &Table, columns: &[impl AsRef<str>]) -> Result<Table, CompareError> {
    let cols = if columns.is_empty() {
        (0..table.column_count()).collect()
    } else {
        resolve(table, columns)?
    };
    let mut seen: HashSet<Vec<&CellValue>> = HashSet::new();
    let keep: Vec<usize> = (0..table.row_count())
        .filter(|&r| seen.insert(cols.iter().map(|&c| table.cell(r, c)).collect()))
        .collect();
    let out = table
        .columns()
        .iter()
        .map(|c| Column::new(c.name.clone(), keep.iter().map(|&r| c.cells[r].clone()).collect()))
        .collect();
    Ok(Table::new(table.name(), out).expect("same shape as the source"))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum JoinKind {
    Inner,
    LeftOuter,
}

impl std::str::FromStr for JoinKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "inner" => Ok(JoinKind::Inner),
            "left" | "left-outer" | "outer" => Ok(JoinKind::LeftOuter),
            _ => Err(format!("unknown join `{s}` (expected inner or left-outer)")),
        }
    }
}

/// Looks up each left row's key in `right` and appends the right table's
/// non-key columns. Right keys must be unique. Null keys never match.
/// A right column whose name is already taken gets a `_right` suffix.
pub fn match_merge(
    left: &Table,
    right: &Table,
    key: &[impl AsRef<str>],
    join: JoinKind,
) -> Result<Table, CompareError> {
    let lk = resolve(left, key)?;
    let rk = resolve(right, key)?;
    let mut index: HashMap<Vec<&CellValue>, usize> = HashMap::new();
    for r in 0..right.row_count() {
        let k: Vec<&CellValue> = rk.iter().map(|&c| right.cell(r, c)).collect();
        if k.iter().any(|v| v.is_null()) {
            continue;
        }
        if index.insert(k.clone(), r).is_some() {
            return Err(CompareError::DuplicateKey {
                table: right.name().to_string(),
                key: key_text(&k),
            });
        }
    }
    let extra: Vec<usize> = (0..right.column_count()).filter(|c| !rk.contains(c)).collect();
    let mut rows: Vec<(usize, Option<usize>)> = Vec::new();
    for r in 0..left.row_count() {
        let k: Vec<&CellValue> = lk.iter().map(|&c| left.cell(r, c)).collect();
        let hit = index.get(&k).copied();
        if hit.is_some() || join == JoinKind::LeftOuter {
            rows.push((r, hit));
        }
    }
    let mut names: HashSet<String> = left.headers().map(str::to_string).collect();
    let mut columns: Vec<Column> = left
        .columns()
        .iter()
        .map(|c| {
            Column::new(
                c.name.clone(),
                rows.iter().map(|&(r, _)| c.cells[r].clone()).collect(),
            )
        })
        .collect();
    for &c in &extra {
        let source = &right.columns()[c];
        let mut name = source.name.clone();
        while !names.insert(name.clone()) {
            name.push_str("_right");
        }
        let cells = rows
            .iter()
            .map(|&(_, hit)| hit.map_or(CellValue::Null, |rr| source.cells[rr].clone()))
            .collect();
        columns.push(Column::new(name, cells));
    }
    Ok(Table::new(left.name(), columns).expect("columns share the row list"))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn keyed(name: &str, keys: &[i64], col: &str) -> Table {
        Table::from_rows(
            name,
            ["k", col],
            keys.iter()
                .map(|&k| vec![k.into(), format!("{col}{k}").as_str().into()])
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn membership() {
        let a = Column::new("a", vec![1.into(), 2.into(), 3.into(), CellValue::Null]);
        let b = Column::new("b", vec![2.into(), 3.into(), 4.into(), 4.into()]);
        let m = set_membership(&a, &b);
        assert_eq!(m.in_both, [2.into(), 3.into()].into());
        assert_eq!(m.only_a, [1.into()].into());
        assert_eq!(m.only_b, [4.into()].into());
        let same = set_membership(&a, &a);
        assert!(same.only_a.is_empty() && same.only_b.is_empty());
    }

    #[test]
    fn unique_rows() {
        let t = Table::from_rows(
            "t",
            ["v"],
            ["A", "B", "A"]
                .iter()
                .map(|s| vec![CellValue::from(*s)])
                .collect(),
        )
        .unwrap();
        let none: [&str; 0] = [];
        let u = extract_unique(&t, &none).unwrap();
        assert_eq!(u.row_count(), 2);
        assert_eq!(u.cell(1, 0), &CellValue::from("B"));
        assert_eq!(extract_unique(&u, &none).unwrap(), u);
        assert!(extract_unique(&t, &["x"]).is_err());
    }

    #[test]
    fn joins() {
        let l = keyed("l", &[1, 2, 3], "a");
        let r = keyed("r", &[2, 3, 4], "b");
        let inner = match_merge(&l, &r, &["k"], JoinKind::Inner).unwrap();
        assert_eq!(inner.row_count(), 2);
        assert_eq!(inner.headers().collect::<Vec<_>>(), ["k", "a", "b"]);
        let outer = match_merge(&l, &r, &["k"], JoinKind::LeftOuter).unwrap();
        assert_eq!(outer.row_count(), 3);
        assert_eq!(outer.cell(0, 2), &CellValue::Null);
        assert_eq!(outer.cell(1, 2), &CellValue::from("b2"));
    }

    #[test]
    fn join_errors_and_name_clash() {
        let l = keyed("l", &[1], "a");
        let dup = keyed("r", &[1, 1], "b");
        assert!(matches!(
            match_merge(&l, &dup, &["k"], JoinKind::Inner),
            Err(CompareError::DuplicateKey { .. })
        ));
        assert!(matches!(
            match_merge(&l, &dup, &["z"], JoinKind::Inner),
            Err(CompareError::MissingColumn { .. })
        ));
        let same = keyed("r", &[1], "a");
        let m = match_merge(&l, &same, &["k"], JoinKind::Inner).unwrap();
        assert_eq!(m.headers().collect::<Vec<_>>(), ["k", "a", "a_right"]);
    }
}
