//! Profile a table: descriptive statistics, bands and a cross-tabulation.

use dqaudit::analytics::{cross_tabulate, descriptive_stats, stratify, Band};
use dqaudit::model::{CellValue, Table};

fn main() {
    let rows = vec![
        vec!["North".into(), "M".into(), CellValue::number(120)],
        vec!["North".into(), "F".into(), CellValue::number(640)],
        vec!["South".into(), "F".into(), CellValue::number(75)],
        vec!["South".into(), "F".into(), CellValue::number(2300)],
        vec!["East".into(), "M".into(), CellValue::Null],
        vec!["East".into(), "F".into(), CellValue::number(980)],
    ];
    let t = Table::from_rows("claims", ["region", "gender", "amount"], rows).unwrap();
    let amount = t.column("amount").unwrap();

    let s = descriptive_stats(amount, 3);
    println!(
        "amount: {} values, {} null, min {:?}, max {:?}, sum {:?}, mean {:?}",
        s.count,
        s.null_count,
        s.min.as_ref().map(|v| v.to_string()),
        s.max.as_ref().map(|v| v.to_string()),
        s.sum,
        s.mean_decimal(2)
    );

    let bands = [Band::new(0, 100), Band::new(100, 1000), Band::new(1000, 10_000)];
    let strata = stratify(amount, &bands).unwrap();
    for (b, n) in bands.iter().zip(&strata.counts) {
        println!("[{}, {}): {n}", b.lower, b.upper);
    }

    let ct = cross_tabulate(t.column("region").unwrap(), t.column("gender").unwrap()).unwrap();
    for r in ct.row_keys() {
        let cells: Vec<String> = ct
            .column_keys()
            .iter()
            .map(|c| format!("{c}={}", ct.get(r, c)))
            .collect();
        println!("{r}: {}", cells.join(" "));
    }
}
