//! Compare two versions of a table by key and by row sequence.

use dqaudit::compare::{diff_tables, AlignMode, DiffOptions};
use dqaudit::model::{CellValue, Table};
use rust_decimal::Decimal;

fn table(name: &str, rows: &[(&str, i64)]) -> Table {
    Table::from_rows(
        name,
        ["account", "balance"],
        rows.iter()
            .map(|&(a, b)| vec![a.into(), CellValue::Number(Decimal::new(b, 2))])
            .collect(),
    )
    .unwrap()
}

fn main() {
    let before = table("before", &[("A-100", 12_500), ("A-200", 300), ("A-300", 9_999)]);
    let after = table(
        "after",
        &[
            ("A-100", 12_500),
            ("A-250", 4_000),
            ("A-200", 350),
            ("A-300", 9_999),
        ],
    );

    let by_key = diff_tables(
        &before,
        &after,
        &AlignMode::Key(vec!["account".into()]),
        &DiffOptions::default(),
    )
    .unwrap();
    print!("{}", by_key.render_text());

    let by_sequence = diff_tables(&before, &after, &AlignMode::Sequence, &DiffOptions::default()).unwrap();
    print!("{}", by_sequence.render_text());
}
