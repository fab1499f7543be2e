//! Audit a CSV file against a schema and print the text report.
//!
//! cargo run --example audit [file.csv] [schema.dq]

use std::path::PathBuf;

use dqaudit::audit::{audit_table, AuditConfig};
use dqaudit::ingest::{coerce_to_schema, load_csv, load_schema, IngestOptions};
use dqaudit::report::{build_scorecard, exit_status, render_report, ReportFormat};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let fixtures = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures");
    let mut args = std::env::args().skip(1);
    let data = args
        .next()
        .map(PathBuf::from)
        .unwrap_or(fixtures.join("orders.csv"));
    let schema = args
        .next()
        .map(PathBuf::from)
        .unwrap_or(fixtures.join("orders.dq"));

    let opts = IngestOptions::default();
    let loaded = load_csv(&data, &opts)?;
    for w in &loaded.warnings {
        eprintln!("warning: {w}");
    }
    let schema = load_schema(&schema)?;
    let table = coerce_to_schema(&loaded.table, &schema, &opts);
    let customers = load_csv(fixtures.join("customers.csv"), &opts)?.table;

    let findings = audit_table(&table, &schema, &[&customers], &AuditConfig::default())?;
    let scorecard = build_scorecard(&findings, &[&table]);
    render_report(
        &findings,
        Some(&scorecard),
        &[&table],
        ReportFormat::Text,
        &mut std::io::stdout(),
    )?;
    println!("exit status would be {}", exit_status(&findings));
    Ok(())
}
