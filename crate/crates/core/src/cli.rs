//! Command-line front end. [`run`] takes the arguments and output streams
//! and returns the process exit status.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::SystemTime;

use clap::{Args, CommandFactory, FromArgMatches, Parser, Subcommand};
use rust_decimal::Decimal;

use crate::analytics::{
    benford, benford_finding, cross_tabulate, descriptive_stats, stratify, Band, SuspiciousPatterns,
};
use crate::audit::{audit_table, AuditConfig};
use crate::checks::{Finding, CHECKS};
use crate::compare::{diff_tables, extract_unique, match_merge, AlignMode, DiffOptions, JoinKind};
use crate::generate::{
    generate_table, inject_errors, measure_detection, parse_weighted_kinds, Fill, InjectionLog,
};
use crate::ingest::{
    coerce_to_schema, infer_types_with, load_csv, load_schema, parse_cell, write_csv, DateLocale,
    IngestOptions,
};
use crate::model::{CellValue, Schema, Table};
use crate::report::{
    build_scorecard, check_timeliness, exit_status, parse_duration, parse_structured, render_report,
    ReportFormat,
};

/// Exit status for bad command lines.
pub const EXIT_USAGE: i32 = 64;
/// Exit status when the tool itself fails (unreadable input and the like).
pub const EXIT_FAILURE: i32 = 3;

#[derive(Parser, Debug)]
#[command(name = "dqaudit", version, about = "Data-quality audits for CSV tables")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run the check suite and print findings with a quality scorecard
    Audit(AuditArgs),
    /// Descriptive statistics, stratification and cross-tabulation
    Stats(StatsArgs),
    /// Leading-digit (Benford) test on one numeric column
    Benford(BenfordArgs),
    /// Cell-level comparison of two tables
    Diff(DiffArgs),
    /// Join two tables on key columns
    Merge(MergeArgs),
    /// Keep the first row for each distinct key
    Unique(UniqueArgs),
    /// Generate a table that satisfies a schema
    Generate(GenerateArgs),
    /// Corrupt a table and log the injected errors
    Inject(InjectArgs),
    /// Score audit findings against an injection log
    Score(ScoreArgs),
}

#[derive(Args, Debug, Clone)]
struct InputArgs {
    /// Field delimiter (a single character; `tab` for tab)
    #[arg(long, default_value = ",", value_parser = parse_delimiter)]
    delimiter: u8,
    /// The first line is data, not headers
    #[arg(long)]
    no_header: bool,
    /// Accept slash dates in day-first (dmy) or month-first (mdy) order
    #[arg(long, value_name = "dmy|mdy")]
    date_locale: Option<DateLocale>,
    /// Decimal separator for numbers
    #[arg(long, default_value_t = '.')]
    decimal_separator: char,
    /// Replace invalid UTF-8 instead of failing
    #[arg(long)]
    lossy: bool,
}

impl InputArgs {
    fn options(&self) -> Result<IngestOptions, String> {
        let mut o = IngestOptions::default().with_delimiter(self.delimiter);
        o.has_header = !self.no_header;
        o.decimal_separator = self.decimal_separator;
        o.lossy_utf8 = self.lossy;
        if let Some(locale) = self.date_locale {
            o = o.with_locale(locale);
        }
        o.validate()?;
        Ok(o)
    }
}

#[derive(Args, Debug)]
struct AuditArgs {
    file: PathBuf,
    /// Schema document; inferred from the data when omitted
    #[arg(long)]
    schema: Option<PathBuf>,
    /// Parent tables for foreign keys (named by file stem)
    #[arg(long = "related", value_name = "FILE")]
    related: Vec<PathBuf>,
    /// Run only these checks (comma-separated ids)
    #[arg(long, value_delimiter = ',', value_parser = parse_check_id)]
    checks: Vec<String>,
    /// Skip these checks (comma-separated ids)
    #[arg(long, value_delimiter = ',', value_parser = parse_check_id)]
    skip: Vec<String>,
    #[arg(long, default_value = "text", value_name = "text|structured|annotated-table")]
    format: ReportFormat,
    /// Worker threads (0: one per core)
    #[arg(long, default_value_t = 0)]
    threads: usize,
    #[arg(long, default_value_t = 100, value_parser = clap::value_parser!(u64).range(1..))]
    benford_min_sample: u64,
    /// Share at which one value dominates a column, in (0, 1]
    #[arg(long, default_value_t = 0.5, value_parser = parse_fraction)]
    dominance_threshold: f64,
    /// Tukey fence multiplier for outliers
    #[arg(long, default_value = "1.5", value_parser = parse_positive_decimal)]
    outlier_k: Decimal,
    /// Flag the input as stale when its file is older than this (e.g. 30d, 12h)
    #[arg(long, value_parser = parse_duration)]
    max_age: Option<std::time::Duration>,
    /// Suspicious-value overrides (`key = value` lines)
    #[arg(long, value_name = "FILE")]
    suspicious: Option<PathBuf>,
    /// Rows sampled for type inference when no schema is given
    #[arg(long, default_value_t = 1000)]
    sample: usize,
    #[command(flatten)]
    input: InputArgs,
}

#[derive(Args, Debug)]
struct StatsArgs {
    file: PathBuf,
    /// Columns to profile (all when omitted)
    #[arg(long, value_delimiter = ',')]
    columns: Vec<String>,
    /// Length of the top and bottom lists
    #[arg(long, default_value_t = 10)]
    k: usize,
    /// Stratify every profiled column into bands, e.g. `0..10,10..20`
    #[arg(long)]
    bands: Option<String>,
    /// Cross-tabulate two columns, e.g. `gender,region`
    #[arg(long, value_name = "A,B", value_parser = parse_pair)]
    crosstab: Option<(String, String)>,
    #[arg(long, default_value = "text", value_name = "text|structured")]
    format: ReportFormat,
    #[command(flatten)]
    input: InputArgs,
}

#[derive(Args, Debug)]
struct BenfordArgs {
    file: PathBuf,
    #[arg(long)]
    column: String,
    #[arg(long, default_value_t = 100, value_parser = clap::value_parser!(u64).range(1..))]
    min_sample: u64,
    #[arg(long, default_value = "text", value_name = "text|structured")]
    format: ReportFormat,
    #[command(flatten)]
    input: InputArgs,
}

#[derive(Args, Debug)]
struct DiffArgs {
    left: PathBuf,
    right: PathBuf,
    /// Align rows by these key columns
    #[arg(long, value_delimiter = ',', conflicts_with = "sequence")]
    key: Vec<String>,
    /// Align rows by longest common subsequence
    #[arg(long)]
    sequence: bool,
    #[arg(long)]
    ignore_case: bool,
    #[arg(long)]
    trim: bool,
    /// Numbers within this distance are equal
    #[arg(long, value_parser = parse_positive_decimal)]
    epsilon: Option<Decimal>,
    #[arg(long, default_value = "text", value_name = "text|structured")]
    format: ReportFormat,
    #[command(flatten)]
    input: InputArgs,
}

#[derive(Args, Debug)]
struct MergeArgs {
    left: PathBuf,
    right: PathBuf,
    #[arg(long, value_delimiter = ',', required = true)]
    key: Vec<String>,
    #[arg(long, default_value = "inner", value_name = "inner|left-outer")]
    join: JoinKind,
    #[command(flatten)]
    input: InputArgs,
}

#[derive(Args, Debug)]
struct UniqueArgs {
    file: PathBuf,
    /// Key columns (whole row when omitted)
    #[arg(long, value_delimiter = ',')]
    columns: Vec<String>,
    #[command(flatten)]
    input: InputArgs,
}

#[derive(Args, Debug)]
struct GenerateArgs {
    #[arg(long)]
    schema: PathBuf,
    #[arg(long)]
    rows: usize,
    #[arg(long)]
    seed: u64,
    /// Per-column fill: `col=random`, `col=fixed:VALUE` or `col=inc:START:STEP`
    #[arg(long = "fill", value_name = "COL=FILL")]
    fills: Vec<String>,
}

#[derive(Args, Debug)]
struct InjectArgs {
    file: PathBuf,
    #[arg(long)]
    seed: u64,
    /// Fraction of eligible cells to corrupt, in (0, 1]
    #[arg(long, value_parser = parse_fraction)]
    rate: f64,
    /// Weighted kinds, e.g. `transpose-digits=2,decimal-shift:+1,unit-scale:1000,blank-out`
    #[arg(long, default_value = "transpose-digits")]
    kinds: String,
    /// Schema supplying ranges and formats for out-of-range and format-corrupt
    #[arg(long)]
    schema: Option<PathBuf>,
    /// Where to write the injection log (JSON)
    #[arg(long)]
    log: Option<PathBuf>,
    #[command(flatten)]
    input: InputArgs,
}

#[derive(Args, Debug)]
struct ScoreArgs {
    /// The table the log was made against
    file: PathBuf,
    #[arg(long)]
    log: PathBuf,
    /// Structured audit report of the corrupted table
    #[arg(long)]
    findings: PathBuf,
    #[arg(long, default_value = "text", value_name = "text|structured")]
    format: ReportFormat,
    #[command(flatten)]
    input: InputArgs,
}

fn parse_delimiter(s: &str) -> Result<u8, String> {
    match s {
        "tab" | "\\t" => Ok(b'\t'),
        _ if s.len() == 1 && s.is_ascii() => Ok(s.as_bytes()[0]),
        _ => Err(format!("delimiter must be one ASCII character, got `{s}`")),
    }
}

fn parse_check_id(s: &str) -> Result<String, String> {
    let s = s.trim();
    match crate::checks::check_info(s) {
        Some(_) => Ok(s.to_string()),
        None => Err(format!("unknown check `{s}`; see --help for the list")),
    }
}

fn parse_pair(s: &str) -> Result<(String, String), String> {
    match s.split_once(',') {
        Some((a, b)) if !a.trim().is_empty() && !b.trim().is_empty() && !b.contains(',') => {
            Ok((a.trim().to_string(), b.trim().to_string()))
        }
        _ => Err(format!("expected two column names `a,b`, got `{s}`")),
    }
}

fn parse_fraction(s: &str) -> Result<f64, String> {
    let v: f64 = s.parse().map_err(|_| format!("`{s}` is not a number"))?;
    if v > 0.0 && v <= 1.0 {
        Ok(v)
    } else {
        Err(format!("{v} is outside (0, 1]"))
    }
}

fn parse_positive_decimal(s: &str) -> Result<Decimal, String> {
    let v: Decimal = s.parse().map_err(|_| format!("`{s}` is not a number"))?;
    if v > Decimal::ZERO {
        Ok(v)
    } else {
        Err(format!("{v} must be positive"))
    }
}

fn check_list() -> String {
    let mut s = String::from("Checks:\n");
    for c in CHECKS {
        s.push_str(&format!(
            "  {:<15} {:<8} {:<12} {}\n",
            c.id,
            c.severity.to_string().to_lowercase(),
            c.dimension.name(),
            c.description
        ));
    }
    s.push_str(
        "\nExit status: 0 no findings, 1 warnings only, 2 errors present, 3 tool failure, 64 usage error.",
    );
    s
}

fn command() -> clap::Command {
    let list = check_list();
    Cli::command()
        .after_help(list.clone())
        .mut_subcommand("audit", |c| c.after_help(list))
}

/// A tool failure: message for the diagnostic stream.
struct Failure(String);

impl<E: std::fmt::Display> From<E> for Failure {
    fn from(e: E) -> Self {
        Failure(e.to_string())
    }
}

type Outcome = Result<i32, Failure>;

/// Parses `args` (including the program name), runs the subcommand and
/// returns its exit status.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let matches = match command().try_get_matches_from(args) {
        Ok(m) => m,
        Err(e) => {
            use clap::error::ErrorKind;
            let text = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = out.write_all(text.as_bytes());
                    0
                }
                _ => {
                    let _ = err.write_all(text.as_bytes());
                    EXIT_USAGE
                }
            };
        }
    };
    let cli = match Cli::from_arg_matches(&matches) {
        Ok(c) => c,
        Err(e) => {
            let _ = write!(err, "{}", e.render());
            return EXIT_USAGE;
        }
    };
    let result = match cli.command {
        Command::Audit(a) => audit(a, out, err),
        Command::Stats(a) => stats(a, out),
        Command::Benford(a) => benford_cmd(a, out),
        Command::Diff(a) => diff(a, out),
        Command::Merge(a) => merge(a, out),
        Command::Unique(a) => unique(a, out),
        Command::Generate(a) => generate(a, out),
        Command::Inject(a) => inject(a, out),
        Command::Score(a) => score(a, out),
    };
    match result {
        Ok(code) => code,
        Err(Failure(msg)) => {
            let _ = writeln!(err, "dqaudit: {msg}");
            EXIT_FAILURE
        }
    }
}

fn load(path: &Path, opts: &IngestOptions, err: &mut dyn Write) -> Result<Table, Failure> {
    let loaded = load_csv(path, opts).map_err(|e| Failure(format!("{}: {e}", path.display())))?;
    for w in &loaded.warnings {
        let _ = writeln!(err, "{}: {w}", path.display());
    }
    Ok(loaded.table)
}

fn load_quiet(path: &Path, opts: &IngestOptions) -> Result<Table, Failure> {
    load(path, opts, &mut std::io::sink())
}

fn audit(a: AuditArgs, out: &mut dyn Write, err: &mut dyn Write) -> Outcome {
    let opts = a.input.options()?;
    let raw = load(&a.file, &opts, err)?;
    let schema = match &a.schema {
        Some(p) => load_schema(p).map_err(|e| Failure(format!("{}: {e}", p.display())))?,
        None => infer_types_with(&raw, a.sample, &opts),
    };
    let table = coerce_to_schema(&raw, &schema, &opts);
    let mut related = Vec::new();
    for p in &a.related {
        related.push(load(p, &opts, err)?);
    }
    let related_refs: Vec<&Table> = related.iter().collect();
    let mut config = AuditConfig {
        threads: a.threads,
        benford_min_sample: a.benford_min_sample as usize,
        dominance_threshold: a.dominance_threshold,
        outlier_k: a.outlier_k,
        ..AuditConfig::default()
    };
    if !a.checks.is_empty() {
        config = config.with_checks(&a.checks)?;
    }
    config = config.without_checks(&a.skip)?;
    if let Some(p) = &a.suspicious {
        let text = std::fs::read_to_string(p).map_err(|e| Failure(format!("{}: {e}", p.display())))?;
        config.suspicious =
            SuspiciousPatterns::parse(&text).map_err(|e| Failure(format!("{}: {e}", p.display())))?;
    }
    let mut findings = audit_table(&table, &schema, &related_refs, &config)?;
    if let Some(max_age) = a.max_age {
        if config.enabled.contains("timeliness") {
            findings.extend(check_timeliness(
                table.name(),
                &a.file,
                max_age,
                SystemTime::now(),
            )?);
            crate::checks::sort_findings(&mut findings);
        }
    }
    let mut scorecard = build_scorecard(&findings, &[&table]);
    if a.max_age.is_some() {
        scorecard.annotate(
            crate::checks::Dimension::Timely,
            "checked against file modification time",
        );
    }
    render_report(&findings, Some(&scorecard), &[&table], a.format, out)?;
    Ok(exit_status(&findings))
}

fn selected_columns(table: &Table, names: &[String]) -> Result<Vec<usize>, Failure> {
    if names.is_empty() {
        return Ok((0..table.column_count()).collect());
    }
    table.resolve_columns(names).map_err(Failure::from)
}

fn parse_bands(text: &str, opts: &IngestOptions) -> Result<Vec<Band>, Failure> {
    text.split(',')
        .map(|b| {
            let (lo, hi) = b
                .split_once("..")
                .ok_or_else(|| Failure(format!("band `{b}` is not `min..max`")))?;
            Ok(Band::new(parse_cell(lo, opts), parse_cell(hi, opts)))
        })
        .collect()
}

fn stats(a: StatsArgs, out: &mut dyn Write) -> Outcome {
    let opts = a.input.options()?;
    let table = load_quiet(&a.file, &opts)?;
    let cols = selected_columns(&table, &a.columns)?;
    let bands = a.bands.as_deref().map(|b| parse_bands(b, &opts)).transpose()?;
    let structured = a.format == ReportFormat::Structured;
    let mut docs = Vec::new();
    let mut text = String::new();
    for &c in &cols {
        let column = &table.columns()[c];
        let s = descriptive_stats(column, a.k);
        let mean = s.mean_decimal(6).map(|m| m.normalize().to_string());
        let strata = bands.as_ref().map(|b| stratify(column, b)).transpose()?;
        if structured {
            let pairs = |v: &[(CellValue, usize)]| -> Vec<serde_json::Value> {
                v.iter()
                    .map(|(x, n)| serde_json::json!({"value": x, "count": n}))
                    .collect()
            };
            let freq: Vec<_> = s
                .frequency
                .iter()
                .map(|(x, n)| serde_json::json!({"value": x, "count": n}))
                .collect();
            docs.push(serde_json::json!({
                "column": column.name,
                "count": s.count,
                "null_count": s.null_count,
                "min": s.min,
                "max": s.max,
                "sum": s.sum,
                "mean": mean,
                "top_k": pairs(&s.top_k),
                "bottom_k": pairs(&s.bottom_k),
                "frequency": freq,
                "strata": strata.as_ref().map(|st| serde_json::json!({
                    "counts": st.counts, "out_of_band": st.out_of_band, "incomparable": st.incomparable
                })),
            }));
        } else {
            let show = |v: &Option<CellValue>| v.as_ref().map_or("-".to_string(), |x| x.to_string());
            text.push_str(&format!(
                "{}: count {} nulls {} distinct {} min {} max {}",
                column.name,
                s.count,
                s.null_count,
                s.frequency.len(),
                show(&s.min),
                show(&s.max)
            ));
            if let Some(m) = &mean {
                text.push_str(&format!(" mean {m}"));
            }
            text.push('\n');
            let list = |v: &[(CellValue, usize)]| {
                v.iter()
                    .map(|(x, n)| format!("{x} ({n})"))
                    .collect::<Vec<_>>()
                    .join(", ")
            };
            text.push_str(&format!(
                "  top: {}\n  bottom: {}\n",
                list(&s.top_k),
                list(&s.bottom_k)
            ));
            if let (Some(st), Some(b)) = (&strata, &bands) {
                for (band, n) in b.iter().zip(&st.counts) {
                    text.push_str(&format!("  [{}, {}): {n}\n", band.lower, band.upper));
                }
                text.push_str(&format!("  out of band: {}\n", st.out_of_band));
                if st.incomparable > 0 {
                    text.push_str(&format!("  not comparable: {}\n", st.incomparable));
                }
            }
        }
    }
    let crosstab = match &a.crosstab {
        Some((x, y)) => {
            let idx = table.resolve_columns(&[x, y])?;
            Some(cross_tabulate(
                &table.columns()[idx[0]],
                &table.columns()[idx[1]],
            )?)
        }
        None => None,
    };
    if structured {
        let mut doc = serde_json::json!({ "table": table.name(), "columns": docs });
        if let Some(ct) = &crosstab {
            let cells: Vec<_> = ct
                .counts
                .iter()
                .map(|((x, y), n)| serde_json::json!({"a": x, "b": y, "count": n}))
                .collect();
            let (x, y) = a.crosstab.as_ref().expect("crosstab requested");
            doc["crosstab"] = serde_json::json!({"a": x, "b": y, "cells": cells});
        }
        serde_json::to_writer_pretty(&mut *out, &doc)?;
        out.write_all(b"\n")?;
    } else {
        if let Some(ct) = &crosstab {
            let cols = ct.column_keys();
            let label = |v: &CellValue| {
                if v.is_null() {
                    "(null)".to_string()
                } else {
                    v.to_string()
                }
            };
            let (x, y) = a.crosstab.as_ref().expect("crosstab requested");
            text.push_str(&format!("{x} \\ {y}"));
            for c in &cols {
                text.push_str(&format!("\t{}", label(c)));
            }
            text.push('\n');
            for r in ct.row_keys() {
                text.push_str(&label(r));
                for c in &cols {
                    text.push_str(&format!("\t{}", ct.get(r, c)));
                }
                text.push('\n');
            }
        }
        out.write_all(text.as_bytes())?;
    }
    Ok(0)
}

fn benford_cmd(a: BenfordArgs, out: &mut dyn Write) -> Outcome {
    let opts = a.input.options()?;
    let table = load_quiet(&a.file, &opts)?;
    let col = table.resolve_columns(&[a.column.as_str()])?[0];
    let result = benford(&table.columns()[col], a.min_sample as usize)?;
    let finding: Vec<Finding> = benford_finding(&table, col, &result).into_iter().collect();
    if a.format == ReportFormat::Structured {
        serde_json::to_writer_pretty(&mut *out, &result)?;
        out.write_all(b"\n")?;
    } else {
        writeln!(out, "digit\tobserved\tproportion\texpected")?;
        for d in 1..=9 {
            writeln!(
                out,
                "{d}\t{}\t{:.4}\t{:.4}",
                result.observed[d - 1],
                result.proportion(d),
                result.expected[d - 1]
            )?;
        }
        writeln!(
            out,
            "n = {}, chi-square = {:.4}, MAD = {:.4}, flagged = {}{}",
            result.sample_size,
            result.chi_square,
            result.mad,
            result.flagged,
            if result.insufficient_sample {
                " (insufficient sample)"
            } else {
                ""
            }
        )?;
    }
    Ok(exit_status(&finding))
}

fn diff(a: DiffArgs, out: &mut dyn Write) -> Outcome {
    let opts = a.input.options()?;
    let left = load_quiet(&a.left, &opts)?;
    let right = load_quiet(&a.right, &opts)?;
    let mode = if !a.key.is_empty() {
        AlignMode::Key(a.key.clone())
    } else if a.sequence {
        AlignMode::Sequence
    } else {
        AlignMode::Position
    };
    let dopts = DiffOptions {
        ignore_case: a.ignore_case,
        trim: a.trim,
        epsilon: a.epsilon,
    };
    let result = diff_tables(&left, &right, &mode, &dopts)?;
    if a.format == ReportFormat::Structured {
        serde_json::to_writer_pretty(&mut *out, &result)?;
        out.write_all(b"\n")?;
    } else {
        out.write_all(result.render_text().as_bytes())?;
    }
    Ok(if result.is_empty() { 0 } else { 1 })
}

fn merge(a: MergeArgs, out: &mut dyn Write) -> Outcome {
    let opts = a.input.options()?;
    let left = load_quiet(&a.left, &opts)?;
    let right = load_quiet(&a.right, &opts)?;
    let merged = match_merge(&left, &right, &a.key, a.join)?;
    write_csv(&merged, &mut *out, &opts)?;
    Ok(0)
}

fn unique(a: UniqueArgs, out: &mut dyn Write) -> Outcome {
    let opts = a.input.options()?;
    let table = load_quiet(&a.file, &opts)?;
    write_csv(&extract_unique(&table, &a.columns)?, &mut *out, &opts)?;
    Ok(0)
}

fn parse_fill(text: &str, opts: &IngestOptions) -> Result<(String, Fill), Failure> {
    let (col, spec) = text
        .split_once('=')
        .ok_or_else(|| Failure(format!("fill `{text}` is not `column=fill`")))?;
    let fill = if spec == "random" {
        Fill::Random
    } else if let Some(v) = spec.strip_prefix("fixed:") {
        Fill::Fixed(parse_cell(v, opts))
    } else if let Some(rest) = spec.strip_prefix("inc:") {
        let (start, step) = rest
            .rsplit_once(':')
            .ok_or_else(|| Failure(format!("fill `{text}` is not `inc:START:STEP`")))?;
        let step: Decimal = step
            .parse()
            .map_err(|_| Failure(format!("bad step in `{text}`")))?;
        Fill::Incremental {
            start: parse_cell(start, opts),
            step,
        }
    } else {
        return Err(Failure(format!(
            "unknown fill `{spec}` (random, fixed:V or inc:START:STEP)"
        )));
    };
    Ok((col.trim().to_string(), fill))
}

fn generate(a: GenerateArgs, out: &mut dyn Write) -> Outcome {
    let opts = IngestOptions::default();
    let schema = load_schema(&a.schema).map_err(|e| Failure(format!("{}: {e}", a.schema.display())))?;
    let fills: BTreeMap<String, Fill> = a
        .fills
        .iter()
        .map(|f| parse_fill(f, &opts))
        .collect::<Result<_, _>>()?;
    let table = generate_table(&schema, a.rows, &fills, a.seed)?;
    write_csv(&table, &mut *out, &opts)?;
    Ok(0)
}

fn optional_schema(path: &Option<PathBuf>) -> Result<Option<Schema>, Failure> {
    path.as_ref()
        .map(|p| load_schema(p).map_err(|e| Failure(format!("{}: {e}", p.display()))))
        .transpose()
}

fn inject(a: InjectArgs, out: &mut dyn Write) -> Outcome {
    let opts = a.input.options()?;
    let raw = load_quiet(&a.file, &opts)?;
    let schema = optional_schema(&a.schema)?;
    let table = match &schema {
        Some(s) => coerce_to_schema(&raw, s, &opts),
        None => raw,
    };
    let kinds = parse_weighted_kinds(&a.kinds)?;
    let (bad, log) = inject_errors(&table, a.rate, &kinds, a.seed, schema.as_ref())?;
    if let Some(p) = &a.log {
        let text = serde_json::to_string_pretty(&log)?;
        std::fs::write(p, text + "\n").map_err(|e| Failure(format!("{}: {e}", p.display())))?;
    }
    write_csv(&bad, &mut *out, &opts)?;
    Ok(0)
}

fn score(a: ScoreArgs, out: &mut dyn Write) -> Outcome {
    let opts = a.input.options()?;
    let table = load_quiet(&a.file, &opts)?;
    let read = |p: &Path| std::fs::read_to_string(p).map_err(|e| Failure(format!("{}: {e}", p.display())));
    let log: InjectionLog = serde_json::from_str(&read(&a.log)?)?;
    let report = parse_structured(&read(&a.findings)?)?;
    let mut findings = report.findings;
    let audited: std::collections::BTreeSet<String> = findings.iter().map(|f| f.table.clone()).collect();
    if audited.len() == 1 {
        // The corrupted copy was audited under its own file name.
        for f in &mut findings {
            f.table = table.name().to_string();
            for a in &mut f.addresses {
                a.sheet = table.name().to_string();
            }
        }
    }
    let detection = measure_detection(&table, &log, &findings)?;
    if a.format == ReportFormat::Structured {
        serde_json::to_writer_pretty(&mut *out, &detection)?;
        out.write_all(b"\n")?;
    } else {
        out.write_all(detection.render_text().as_bytes())?;
    }
    Ok(0)
}
