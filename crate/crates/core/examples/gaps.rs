//! Duplicates and gaps in a cheque-number sequence.

use dqaudit::analytics::{duplicate_findings, find_duplicates, find_gaps, gap_findings};
use dqaudit::model::{CellValue, Table};
use rust_decimal::Decimal;

fn main() {
    let cheques = [1001, 1002, 1003, 1003, 1006, 1007, 1009, 1010];
    let t = Table::from_rows(
        "cheques",
        ["number"],
        cheques.iter().map(|&n| vec![CellValue::number(n)]).collect(),
    )
    .unwrap();

    let gaps = find_gaps(t.column("number").unwrap(), Decimal::ONE).unwrap();
    println!("missing cheques: {}", gaps.missing_count());
    for g in &gaps.gaps {
        let missing: Vec<String> = g
            .missing_values(Decimal::ONE)
            .iter()
            .map(|v| v.to_string())
            .collect();
        println!("  after {}: {}", g.after, missing.join(", "));
    }
    for f in gap_findings(&t, 0, &gaps) {
        println!("{}", dqaudit::report::finding_line(&f));
    }

    let dups = find_duplicates(&t, &["number"]).unwrap();
    for f in duplicate_findings(&t, &dups) {
        println!("{}", dqaudit::report::finding_line(&f));
    }
}
