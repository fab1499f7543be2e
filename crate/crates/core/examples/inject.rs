//! Generate clean test data, inject errors and measure how many the audit finds.

use std::collections::BTreeMap;

use dqaudit::audit::{audit_table, AuditConfig};
use dqaudit::generate::{generate_table, inject_errors, measure_detection, parse_weighted_kinds};
use dqaudit::ingest::parse_schema;

const SCHEMA: &str = "\
table payroll
column id: type=number pk step=1
column grade: type=text values=A|B|C|D
column salary: type=number required range=18000..95000
column hours: type=number required range=10..48
";

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let schema = parse_schema(SCHEMA, "payroll")?;
    let clean = generate_table(&schema, 2000, &BTreeMap::new(), 11)?;
    let kinds =
        parse_weighted_kinds("transpose-digits=2,decimal-shift:+1,blank-out,out-of-range,duplicate-row")?;
    let (bad, log) = inject_errors(&clean, 0.01, &kinds, 12, Some(&schema))?;
    println!("injected {} errors", log.entries.len());

    let findings = audit_table(&bad, &schema, &[], &AuditConfig::default())?;
    let report = measure_detection(&clean, &log, &findings)?;
    print!("{}", report.render_text());
    Ok(())
}
