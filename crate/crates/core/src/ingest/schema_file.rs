//! Line-oriented schema documents.
//!
//! ```text
//! # comment
//! table claims
//! column id: type=number pk step=1
//! column amount: type=number range=0..5000 unit=GBP benford
//! column injury: type=text values=BROKEN_LEG|SPRAIN|BURN|OTHER
//! column opened: type=date format=YYYY-MM-DD range=2000-01-01..2030-12-31
//! column policy: type=number required fk=policies.id
//! column note: type=text size=200 note.source="call centre"
//! rule john_male: when first_name in {John} expect gender = "M"
//! severity format=error atomicity=info
//! ```
//!
//! Column attributes: `type=<number|text|date|boolean>` (default text),
//! `nullable` / `required`, `range=<min>..<max>`, `values=<v1|v2|...>`,
//! `casefold`, `size=<n>`, `format=<pattern>`, `unit=<label>`, `pk`,
//! `fk=<table>.<column>`, `default=<value>`, `step=<n>`, `benford` and
//! `note.<key>=<text>`. Values containing spaces are double-quoted.

use std::path::Path;

use rust_decimal::Decimal;

use super::csv_io::{parse_boolean, parse_number_lenient};
use super::{SchemaError, SchemaErrorKind};
use crate::checks::{check_info, ConsistencyRule, Severity};
use crate::model::{
    CellValue, ColumnSpec, DataType, DateValue, ForeignKey, FormatPattern, Schema, ValueRange,
};

pub fn load_schema(path: impl AsRef<Path>) -> Result<Schema, SchemaError> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| SchemaError {
        line: 0,
        column: 0,
        kind: SchemaErrorKind::Io(format!("{}: {e}", path.display())),
    })?;
    let default_name = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    parse_schema(&text, &default_name)
}

/// Parses a schema document; `default_table` names the table when the
/// document has no `table` line.
pub fn parse_schema(text: &str, default_table: &str) -> Result<Schema, SchemaError> {
    let mut schema = Schema::new(default_table);
    let mut seen_table = false;
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let trimmed = raw.trim_start();
        let indent = raw.len() - trimmed.len();
        let line = trimmed.trim_end();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let err = |col: usize, kind: SchemaErrorKind| SchemaError {
            line: line_no,
            column: indent + col + 1,
            kind,
        };
        let (keyword, rest) = line.split_once(char::is_whitespace).unwrap_or((line, ""));
        let rest_offset = line.len() - rest.len();
        match keyword {
            "table" => {
                let name = rest.trim();
                if name.is_empty() {
                    return Err(err(0, SchemaErrorKind::Parse("table needs a name".into())));
                }
                if seen_table {
                    return Err(err(0, SchemaErrorKind::Parse("duplicate `table` line".into())));
                }
                seen_table = true;
                schema.table = unquote(name).to_string();
            }
            "column" => {
                let spec = parse_column(rest).map_err(|(col, kind)| err(rest_offset + col, kind))?;
                if schema.spec(&spec.name).is_some() {
                    return Err(err(
                        rest_offset,
                        SchemaErrorKind::ConflictingRule(format!("column `{}` declared twice", spec.name)),
                    ));
                }
                schema.columns.push(spec);
            }
            "rule" => {
                let (name, body) = split_name(rest).ok_or_else(|| {
                    err(
                        rest_offset,
                        SchemaErrorKind::Parse("expected `rule <name>: when ... expect ...`".into()),
                    )
                })?;
                let body_offset = rest_offset + (rest.len() - body.len());
                let rule = ConsistencyRule::parse(&name, body)
                    .map_err(|e| err(body_offset + e.offset, SchemaErrorKind::Parse(e.message)))?;
                if schema.rules.iter().any(|r| r.name == rule.name) {
                    return Err(err(
                        rest_offset,
                        SchemaErrorKind::ConflictingRule(format!("rule `{name}` declared twice")),
                    ));
                }
                schema.rules.push(rule);
            }
            "severity" => {
                for (col, tok) in tokens(rest).map_err(|(c, k)| err(rest_offset + c, k))? {
                    let at = rest_offset + col;
                    let (id, level) = tok.split_once('=').ok_or_else(|| {
                        err(
                            at,
                            SchemaErrorKind::Parse(format!("expected <check>=<severity>, found `{tok}`")),
                        )
                    })?;
                    if check_info(id).is_none() {
                        return Err(err(
                            at,
                            SchemaErrorKind::UnknownAttribute(format!("check `{id}`")),
                        ));
                    }
                    let sev: Severity = level
                        .parse()
                        .map_err(|e: String| err(at, SchemaErrorKind::Parse(e)))?;
                    schema.severity_overrides.insert(id.to_string(), sev);
                }
            }
            other => {
                return Err(err(
                    0,
                    SchemaErrorKind::Parse(format!("unknown directive `{other}`")),
                ));
            }
        }
    }
    Ok(schema)
}

fn unquote(s: &str) -> &str {
    s.strip_prefix('"').and_then(|t| t.strip_suffix('"')).unwrap_or(s)
}

/// Splits `<name>: <rest>` where the name may be double-quoted.
fn split_name(s: &str) -> Option<(String, &str)> {
    let s = s.trim_start();
    if let Some(q) = s.strip_prefix('"') {
        let end = q.find('"')?;
        let name = &q[..end];
        let after = q[end + 1..].trim_start();
        let body = after.strip_prefix(':').unwrap_or(after);
        return Some((name.to_string(), body));
    }
    match s.split_once(':') {
        Some((name, body)) => {
            let name = name.trim();
            (!name.is_empty()).then(|| (name.to_string(), body))
        }
        None => {
            let name = s.trim();
            (!name.is_empty()).then(|| (name.to_string(), ""))
        }
    }
}

type Located<T> = Result<T, (usize, SchemaErrorKind)>;

/// Whitespace-separated tokens with offsets; quotes protect spaces.
fn tokens(s: &str) -> Located<Vec<(usize, String)>> {
    let mut out = Vec::new();
    let mut chars = s.char_indices().peekable();
    while let Some(&(start, c)) = chars.peek() {
        if c.is_whitespace() {
            chars.next();
            continue;
        }
        let mut tok = String::new();
        let mut in_quote = false;
        while let Some(&(_, c)) = chars.peek() {
            if c.is_whitespace() && !in_quote {
                break;
            }
            chars.next();
            match c {
                '"' => in_quote = !in_quote,
                '\\' if in_quote => {
                    if let Some((_, esc)) = chars.next() {
                        tok.push(esc);
                    }
                }
                _ => tok.push(c),
            }
        }
        if in_quote {
            return Err((start, SchemaErrorKind::Parse("unterminated quote".into())));
        }
        out.push((start, tok));
    }
    Ok(out)
}

fn parse_column(rest: &str) -> Located<ColumnSpec> {
    let (name, attrs) = split_name(rest).ok_or((0, SchemaErrorKind::Parse("column needs a name".into())))?;
    let attrs_offset = rest.len() - attrs.len();
    let mut spec = ColumnSpec::new(name, DataType::Text);
    let mut explicit_nullable: Option<bool> = None;
    let mut raw_range: Option<(usize, String)> = None;
    let mut raw_values: Option<(usize, String)> = None;
    let mut raw_default: Option<(usize, String)> = None;
    for (col, tok) in tokens(attrs).map_err(|(c, k)| (attrs_offset + c, k))? {
        let at = attrs_offset + col;
        let (key, value) = match tok.split_once('=') {
            Some((k, v)) => (k, Some(v.to_string())),
            None => (tok.as_str(), None),
        };
        let need = |v: Option<String>| -> Located<String> {
            v.filter(|v| !v.is_empty())
                .ok_or((at, SchemaErrorKind::Parse(format!("`{key}` needs a value"))))
        };
        let flag = |v: Option<String>| -> Located<bool> {
            match v.as_deref() {
                None => Ok(true),
                Some(s) => parse_boolean(s).ok_or((
                    at,
                    SchemaErrorKind::Parse(format!("`{key}` expects true or false")),
                )),
            }
        };
        match key {
            "type" => {
                let v = need(value)?;
                spec.data_type = v.parse().map_err(|e: String| (at, SchemaErrorKind::Parse(e)))?;
            }
            "nullable" => explicit_nullable = Some(flag(value)?),
            "required" | "not-null" => explicit_nullable = Some(!flag(value)?),
            "pk" | "primary_key" => spec.is_primary_key = flag(value)?,
            "casefold" => spec.case_insensitive = flag(value)?,
            "benford" => spec.benford = flag(value)?,
            "range" => raw_range = Some((at, need(value)?)),
            "values" => raw_values = Some((at, need(value)?)),
            "default" => raw_default = Some((at, need(value)?)),
            "size" => {
                let v = need(value)?;
                spec.max_size = Some(
                    v.parse()
                        .map_err(|_| (at, SchemaErrorKind::Parse(format!("size `{v}` is not a count"))))?,
                );
            }
            "format" => {
                let v = need(value)?;
                spec.format = Some(
                    FormatPattern::parse(&v)
                        .map_err(|e| (at, SchemaErrorKind::Parse(format!("bad format pattern: {e}"))))?,
                );
            }
            "unit" => spec.unit = Some(need(value)?),
            "fk" => {
                let v = need(value)?;
                let (table, column) = v
                    .split_once('.')
                    .filter(|(t, c)| !t.is_empty() && !c.is_empty())
                    .ok_or((
                        at,
                        SchemaErrorKind::Parse(format!("fk `{v}` must be <table>.<column>")),
                    ))?;
                spec.foreign_key = Some(ForeignKey {
                    table: table.to_string(),
                    column: column.to_string(),
                });
            }
            "step" => {
                let v = need(value)?;
                let step = parse_number_lenient(&v, '.')
                    .filter(|d| *d > Decimal::ZERO)
                    .ok_or((
                        at,
                        SchemaErrorKind::Parse(format!("step `{v}` must be a positive number")),
                    ))?;
                spec.sequence_step = Some(step);
            }
            k if k.starts_with("note.") && k.len() > 5 => {
                spec.annotations
                    .insert(k[5..].to_string(), value.unwrap_or_default());
            }
            other => return Err((at, SchemaErrorKind::UnknownAttribute(other.to_string()))),
        }
    }
    let ty = spec.data_type;
    if let Some((at, raw)) = raw_range {
        let (lo, hi) = raw.split_once("..").ok_or((
            at,
            SchemaErrorKind::Parse(format!("range `{raw}` must be <min>..<max>")),
        ))?;
        if !matches!(ty, DataType::Number | DataType::Date) {
            return Err((
                at,
                SchemaErrorKind::ConflictingRule(format!("range is not allowed on a {ty} column")),
            ));
        }
        spec.range = Some(ValueRange::new(typed(lo, ty, at)?, typed(hi, ty, at)?));
    }
    if let Some((at, raw)) = raw_values {
        let values = raw
            .split('|')
            .map(|v| typed(v, ty, at))
            .collect::<Located<Vec<_>>>()?;
        spec.restricted_values = Some(values);
    }
    if let Some((at, raw)) = raw_default {
        spec.default_value = Some(typed(&raw, ty, at)?);
    }
    match explicit_nullable {
        Some(true) if spec.is_primary_key => {
            return Err((
                attrs_offset,
                SchemaErrorKind::ConflictingRule(format!(
                    "column `{}` is a primary key and cannot be nullable",
                    spec.name
                )),
            ))
        }
        Some(n) => spec.nullable = n && !spec.is_primary_key,
        None => spec.nullable = !spec.is_primary_key,
    }
    spec.validate()
        .map_err(|e| (attrs_offset, SchemaErrorKind::ConflictingRule(e)))?;
    Ok(spec)
}

fn typed(raw: &str, ty: DataType, at: usize) -> Located<CellValue> {
    let bad = || (at, SchemaErrorKind::Parse(format!("`{raw}` is not a valid {ty}")));
    Ok(match ty {
        DataType::Text => CellValue::Text(raw.to_string()),
        DataType::Number => CellValue::Number(parse_number_lenient(raw, '.').ok_or_else(bad)?),
        DataType::Date => CellValue::Date(raw.parse::<DateValue>().map_err(|_| bad())?),
        DataType::Boolean => CellValue::Boolean(parse_boolean(raw).ok_or_else(bad)?),
    })
}

fn quote(s: &str) -> String {
    if !s.is_empty() && !s.chars().any(|c| c.is_whitespace() || c == '"' || c == '\\') {
        s.to_string()
    } else {
        format!("\"{}\"", s.replace('\\', "\\\\").replace('"', "\\\""))
    }
}

/// Renders a schema in the document format accepted by [`parse_schema`].
pub fn render_schema(schema: &Schema) -> String {
    let mut out = format!("table {}\n", quote(&schema.table));
    for spec in &schema.columns {
        let mut attrs = vec![format!("type={}", spec.data_type)];
        if spec.is_primary_key {
            attrs.push("pk".into());
        } else if !spec.nullable {
            attrs.push("required".into());
        }
        if let Some(r) = &spec.range {
            attrs.push(format!("range={}..{}", r.min, r.max));
        }
        if let Some(values) = &spec.restricted_values {
            let joined = values
                .iter()
                .map(ToString::to_string)
                .collect::<Vec<_>>()
                .join("|");
            attrs.push(format!("values={}", quote(&joined)));
        }
        if spec.case_insensitive {
            attrs.push("casefold".into());
        }
        if let Some(n) = spec.max_size {
            attrs.push(format!("size={n}"));
        }
        if let Some(f) = &spec.format {
            attrs.push(format!("format={}", quote(f.source())));
        }
        if let Some(u) = &spec.unit {
            attrs.push(format!("unit={}", quote(u)));
        }
        if let Some(fk) = &spec.foreign_key {
            attrs.push(format!("fk={}", quote(&fk.to_string())));
        }
        if let Some(d) = &spec.default_value {
            attrs.push(format!("default={}", quote(&d.to_string())));
        }
        if let Some(step) = spec.sequence_step {
            attrs.push(format!("step={step}"));
        }
        if spec.benford {
            attrs.push("benford".into());
        }
        for (k, v) in &spec.annotations {
            attrs.push(format!("note.{k}={}", quote(v)));
        }
        let name = if spec.name.contains([':', '"']) || spec.name.contains(char::is_whitespace) {
            format!("\"{}\"", spec.name)
        } else {
            spec.name.clone()
        };
        out.push_str(&format!("column {name}: {}\n", attrs.join(" ")));
    }
    for rule in &schema.rules {
        out.push_str(&format!("rule {}: {rule}\n", rule.name));
    }
    if !schema.severity_overrides.is_empty() {
        let pairs = schema
            .severity_overrides
            .iter()
            .map(|(k, v)| format!("{k}={}", v.to_string().to_lowercase()))
            .collect::<Vec<_>>()
            .join(" ");
        out.push_str(&format!("severity {pairs}\n"));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use rust_decimal_macros::dec;

    #[test]
    fn range_maps_directly() {
        let s = parse_schema("column score: type=number range=0..100", "t").unwrap();
        assert_eq!(s.columns[0].range, Some(ValueRange::numbers(dec!(0), dec!(100))));
    }

    #[test]
    fn pk_plus_nullable_conflicts() {
        let e = parse_schema("column id: type=number pk nullable", "t").unwrap_err();
        assert!(matches!(e.kind, SchemaErrorKind::ConflictingRule(_)));
        assert_eq!(e.line, 1);
        let e = parse_schema("column id: type=number primary_key=true nullable=true", "t").unwrap_err();
        assert!(matches!(e.kind, SchemaErrorKind::ConflictingRule(_)));
    }

    #[test]
    fn minimal_spec_defaults() {
        let s = parse_schema("column a\ncolumn b\n", "t").unwrap();
        assert_eq!(s.table, "t");
        for spec in &s.columns {
            assert_eq!(spec, &ColumnSpec::new(spec.name.clone(), DataType::Text));
        }
    }

    #[test]
    fn unknown_attribute_is_located() {
        let e = parse_schema("\n  column a: type=text colour=red", "t").unwrap_err();
        assert_eq!(e.kind, SchemaErrorKind::UnknownAttribute("colour".into()));
        assert_eq!((e.line, e.column), (2, 23));
    }

    #[test]
    fn text_range_is_rejected() {
        let e = parse_schema("column a: type=text range=a..z", "t").unwrap_err();
        assert!(matches!(e.kind, SchemaErrorKind::ConflictingRule(_)));
    }

    #[test]
    fn bad_values_are_parse_errors() {
        let e = parse_schema("column a: type=number values=1|x", "t").unwrap_err();
        assert!(matches!(e.kind, SchemaErrorKind::Parse(_)));
        let e = parse_schema("column a: type=number range=5..1", "t").unwrap_err();
        assert!(matches!(e.kind, SchemaErrorKind::ConflictingRule(_)));
        let e = parse_schema("column a: type=date range=2020-01-01", "t").unwrap_err();
        assert!(matches!(e.kind, SchemaErrorKind::Parse(_)));
    }

    #[test]
    fn rule_errors_point_into_the_body() {
        let e = parse_schema("rule r: when a ~ 1 expect b = 2", "t").unwrap_err();
        assert_eq!(e.column, 16);
    }

    #[test]
    fn full_document() {
        let doc = r#"
# claims register
table claims
column id: type=number pk step=1
column "first name": type=text size=40 note.source="call centre"
column injury: type=text values="BROKEN_LEG|SPRAIN|BURN" casefold
column opened: type=date format=YYYY-MM-DD range=2000-01-01..2030-12-31
column policy: type=number required fk=policies.id
column amount: type=number range=-10.5..5000 unit=GBP benford default=0
rule john_male: when "first name" in {John} expect injury != BURN
severity format=error
"#;
        let s = parse_schema(doc, "ignored").unwrap();
        assert_eq!(s.table, "claims");
        assert_eq!(s.columns.len(), 6);
        let id = s.spec("id").unwrap();
        assert!(id.is_primary_key && !id.nullable);
        assert_eq!(id.sequence_step, Some(dec!(1)));
        assert_eq!(s.spec("first name").unwrap().annotations["source"], "call centre");
        assert_eq!(
            s.spec("injury")
                .unwrap()
                .restricted_values
                .as_ref()
                .unwrap()
                .len(),
            3
        );
        assert!(s.spec("opened").unwrap().format.as_ref().unwrap().is_date());
        assert!(!s.spec("policy").unwrap().nullable);
        assert_eq!(
            s.spec("amount").unwrap().range,
            Some(ValueRange::numbers(dec!(-10.5), dec!(5000)))
        );
        assert_eq!(s.rules.len(), 1);
        assert_eq!(s.severity_overrides["format"], Severity::Error);

        let again = parse_schema(&render_schema(&s), "x").unwrap();
        assert_eq!(again, s);
    }
}
