//! The three report formats for the same findings.

use dqaudit::audit::{audit_table, AuditConfig};
use dqaudit::ingest::{coerce_to_schema, load_csv, load_schema, IngestOptions};
use dqaudit::report::{build_scorecard, parse_structured, render_report, ReportFormat};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let dir = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures");
    let opts = IngestOptions::default();
    let schema = load_schema(dir.join("people.dq"))?;
    let table = coerce_to_schema(&load_csv(dir.join("people.csv"), &opts)?.table, &schema, &opts);
    let findings = audit_table(&table, &schema, &[], &AuditConfig::default())?;
    let scorecard = build_scorecard(&findings, &[&table]);

    for format in [ReportFormat::Text, ReportFormat::AnnotatedTable] {
        render_report(
            &findings,
            Some(&scorecard),
            &[&table],
            format,
            &mut std::io::stdout(),
        )?;
        println!();
    }
    let mut json = Vec::new();
    render_report(
        &findings,
        Some(&scorecard),
        &[&table],
        ReportFormat::Structured,
        &mut json,
    )?;
    let text = String::from_utf8(json)?;
    println!("{text}");
    assert_eq!(parse_structured(&text)?.findings, findings);
    Ok(())
}
