//! Set membership, unique extraction and match-merge between two tables.

use dqaudit::compare::{extract_unique, match_merge, set_membership, JoinKind};
use dqaudit::ingest::{load_csv, write_csv, IngestOptions};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let dir = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures");
    let opts = IngestOptions::default();
    let orders = load_csv(dir.join("orders.csv"), &opts)?.table;
    let customers = load_csv(dir.join("customers.csv"), &opts)?.table;

    let m = set_membership(
        orders.column("customer_id").unwrap(),
        customers.column("customer_id").unwrap(),
    );
    println!(
        "ordering customers on file: {:?}",
        m.in_both.iter().map(|v| v.to_string()).collect::<Vec<_>>()
    );
    println!(
        "unknown customers: {:?}",
        m.only_a.iter().map(|v| v.to_string()).collect::<Vec<_>>()
    );
    println!(
        "customers without orders: {:?}",
        m.only_b.iter().map(|v| v.to_string()).collect::<Vec<_>>()
    );

    let merged = match_merge(&orders, &customers, &["customer_id"], JoinKind::LeftOuter)?;
    write_csv(&merged, std::io::stdout(), &opts)?;
    let first_orders = extract_unique(&orders, &["customer_id"])?;
    write_csv(&first_orders, std::io::stdout(), &opts)?;
    Ok(())
}
