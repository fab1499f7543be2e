use std::fs::File;
use std::io::{BufReader, Read, Write};
use std::path::Path;

use rust_decimal::Decimal;

use super::{IngestError, IngestOptions};
use crate::model::{parse_date_strict, CellValue, Column, DateValue, Table};

/// A source row whose width differed from the header.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StructuralWarning {
    /// 1-based data row in the resulting table.
    pub row: usize,
    /// 1-based line where the record starts in the source file.
    pub line: u64,
    pub expected: usize,
    pub found: usize,
}

impl StructuralWarning {
    pub fn is_short(&self) -> bool {
        self.found < self.expected
    }
}

impl std::fmt::Display for StructuralWarning {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let what = if self.is_short() {
            "padded with nulls"
        } else {
            "extra fields dropped"
        };
        write!(
            f,
            "line {}: {} fields, expected {} ({what})",
            self.line, self.found, self.expected
        )
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LoadedTable {
    pub table: Table,
    pub warnings: Vec<StructuralWarning>,
}

/// Parses a number written with the given decimal separator. Leading zeros
/// (`007`), exponents, thousands separators and bare fractions (`.5`) are
/// rejected so such text stays text.
pub fn parse_number(s: &str, decimal_separator: char) -> Option<Decimal> {
    let body = s.strip_prefix(['-', '+']).unwrap_or(s);
    let (int, frac) = match body.split_once(decimal_separator) {
        Some((i, f)) => (i, Some(f)),
        None => (body, None),
    };
    if int.is_empty() || !int.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    if int.len() > 1 && int.starts_with('0') {
        return None;
    }
    if let Some(f) = frac {
        if f.is_empty() || !f.bytes().all(|b| b.is_ascii_digit()) {
            return None;
        }
    }
    let normalized;
    let text = if decimal_separator == '.' {
        s
    } else {
        normalized = s.replace(decimal_separator, ".");
        &normalized
    };
    Decimal::from_str_exact(text.strip_prefix('+').unwrap_or(text)).ok()
}

/// Parses a number without the leading-zero rule, for columns a schema
/// declares numeric.
pub(crate) fn parse_number_lenient(s: &str, decimal_separator: char) -> Option<Decimal> {
    let s = s.trim();
    let normalized = s.replace(decimal_separator, ".");
    let t = normalized.strip_prefix('+').unwrap_or(&normalized);
    if t.is_empty() || t.contains(['e', 'E']) {
        return None;
    }
    Decimal::from_str_exact(t).ok()
}

pub fn parse_boolean(s: &str) -> Option<bool> {
    if s.eq_ignore_ascii_case("true") {
        Some(true)
    } else if s.eq_ignore_ascii_case("false") {
        Some(false)
    } else {
        None
    }
}

pub fn parse_date(s: &str, opts: &IngestOptions) -> Option<DateValue> {
    opts.date_patterns.iter().find_map(|p| parse_date_strict(s, p))
}

/// Types one raw field: null token, then number, date, boolean, text.
pub fn parse_cell(raw: &str, opts: &IngestOptions) -> CellValue {
    let s = if opts.trim_whitespace { raw.trim() } else { raw };
    if opts.null_tokens.contains(s) {
        return CellValue::Null;
    }
    if let Some(d) = parse_number(s, opts.decimal_separator) {
        return CellValue::Number(d);
    }
    if let Some(d) = parse_date(s, opts) {
        return CellValue::Date(d);
    }
    if let Some(b) = parse_boolean(s) {
        return CellValue::Boolean(b);
    }
    CellValue::Text(s.to_string())
}

/// Renders a cell the way [`parse_cell`] reads it back.
pub fn format_cell(cell: &CellValue, opts: &IngestOptions) -> String {
    match cell {
        CellValue::Null => opts.null_output().to_string(),
        CellValue::Number(d) if opts.decimal_separator != '.' => {
            d.to_string().replace('.', &opts.decimal_separator.to_string())
        }
        other => other.to_string(),
    }
}

pub fn load_csv(path: impl AsRef<Path>, opts: &IngestOptions) -> Result<LoadedTable, IngestError> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|source| IngestError::Io {
        path: path.display().to_string(),
        source,
    })?;
    let name = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "table".to_string());
    read_csv(BufReader::with_capacity(1 << 16, file), &name, opts).map_err(|e| match e {
        IngestError::EmptyInput { .. } => IngestError::EmptyInput {
            source_name: path.display().to_string(),
        },
        other => other,
    })
}

/// Reads RFC 4180 CSV from any reader into a table called `name`.
pub fn read_csv<R: Read>(reader: R, name: &str, opts: &IngestOptions) -> Result<LoadedTable, IngestError> {
    opts.validate().map_err(IngestError::Options)?;
    let mut rdr = csv::ReaderBuilder::new()
        .delimiter(opts.delimiter)
        .has_headers(false)
        .flexible(true)
        .from_reader(reader);
    let mut record = csv::ByteRecord::new();
    let mut headers: Option<Vec<String>> = None;
    let mut columns: Vec<Vec<CellValue>> = Vec::new();
    let mut warnings = Vec::new();
    let mut rows = 0usize;
    loop {
        let more = rdr.read_byte_record(&mut record).map_err(IngestError::Csv)?;
        if !more {
            break;
        }
        let line = record.position().map_or(0, |p| p.line());
        if headers.is_none() {
            let width = record.len();
            if opts.has_header {
                let names = record
                    .iter()
                    .enumerate()
                    .map(|(i, f)| {
                        let text = decode(f, line, opts)?;
                        let t = text.trim();
                        Ok(if t.is_empty() {
                            format!("column_{}", i + 1)
                        } else {
                            t.to_string()
                        })
                    })
                    .collect::<Result<Vec<_>, IngestError>>()?;
                columns = vec![Vec::new(); width];
                headers = Some(names);
                continue;
            }
            headers = Some((1..=width).map(|i| format!("column_{i}")).collect());
            columns = vec![Vec::new(); width];
        }
        let width = columns.len();
        rows += 1;
        if record.len() != width {
            warnings.push(StructuralWarning {
                row: rows,
                line,
                expected: width,
                found: record.len(),
            });
        }
        for (i, col) in columns.iter_mut().enumerate() {
            match record.get(i) {
                Some(field) => col.push(parse_cell(&decode(field, line, opts)?, opts)),
                None => col.push(CellValue::Null),
            }
        }
    }
    let Some(headers) = headers else {
        if opts.has_header {
            return Err(IngestError::EmptyInput {
                source_name: name.to_string(),
            });
        }
        return Ok(LoadedTable {
            table: Table::new(name, Vec::new())?,
            warnings,
        });
    };
    let columns = headers
        .into_iter()
        .zip(columns)
        .map(|(h, cells)| Column::new(h, cells))
        .collect();
    Ok(LoadedTable {
        table: Table::new(name, columns)?,
        warnings,
    })
}

fn decode<'a>(
    field: &'a [u8],
    line: u64,
    opts: &IngestOptions,
) -> Result<std::borrow::Cow<'a, str>, IngestError> {
    match std::str::from_utf8(field) {
        Ok(s) => Ok(std::borrow::Cow::Borrowed(s)),
        Err(_) if opts.lossy_utf8 => Ok(String::from_utf8_lossy(field)),
        Err(_) => Err(IngestError::Encoding { line }),
    }
}

/// Writes a table as CSV with a header row.
pub fn write_csv<W: Write>(table: &Table, writer: W, opts: &IngestOptions) -> Result<(), IngestError> {
    let mut w = csv::WriterBuilder::new()
        .delimiter(opts.delimiter)
        .from_writer(writer);
    if opts.has_header {
        w.write_record(table.headers()).map_err(IngestError::Csv)?;
    }
    let mut buf: Vec<String> = Vec::with_capacity(table.column_count());
    for row in 0..table.row_count() {
        buf.clear();
        buf.extend(table.columns().iter().map(|c| format_cell(&c.cells[row], opts)));
        w.write_record(&buf).map_err(IngestError::Csv)?;
    }
    w.flush().map_err(|source| IngestError::Io {
        path: "<output>".into(),
        source,
    })?;
    Ok(())
}

pub fn write_csv_file(
    table: &Table,
    path: impl AsRef<Path>,
    opts: &IngestOptions,
) -> Result<(), IngestError> {
    let path = path.as_ref();
    let file = File::create(path).map_err(|source| IngestError::Io {
        path: path.display().to_string(),
        source,
    })?;
    write_csv(table, std::io::BufWriter::new(file), opts)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rust_decimal_macros::dec;

    fn read(text: &str, opts: &IngestOptions) -> LoadedTable {
        read_csv(text.as_bytes(), "t", opts).unwrap()
    }

    #[test]
    fn quoted_fields() {
        let t = read("a,\"b,c\",3\n", &IngestOptions::default().without_header()).table;
        assert_eq!(
            t.row_cloned(0),
            vec![
                CellValue::text("a"),
                CellValue::text("b,c"),
                CellValue::number(dec!(3))
            ]
        );
    }

    #[test]
    fn embedded_newline_and_quote() {
        let t = read("h\n\"x\ny \"\"q\"\"\"\n", &IngestOptions::default()).table;
        assert_eq!(t.cell(0, 0), &CellValue::text("x\ny \"q\""));
    }

    #[test]
    fn empty_field_is_null() {
        let t = read("x,,y\n", &IngestOptions::default().without_header()).table;
        assert_eq!(t.cell(0, 1), &CellValue::Null);
    }

    #[test]
    fn short_and_long_rows_warn() {
        let loaded = read("a,b\n1\n1,2,3\n4,5\n", &IngestOptions::default());
        assert_eq!(loaded.table.row_count(), 3);
        assert_eq!(loaded.warnings.len(), 2);
        assert!(loaded.warnings[0].is_short());
        assert_eq!(loaded.warnings[0].line, 2);
        assert_eq!(loaded.warnings[1].row, 2);
        assert_eq!(loaded.table.cell(0, 1), &CellValue::Null);
    }

    #[test]
    fn empty_input_errors_with_header() {
        let err = read_csv("".as_bytes(), "t", &IngestOptions::default()).unwrap_err();
        assert!(matches!(err, IngestError::EmptyInput { .. }));
        let ok = read_csv("".as_bytes(), "t", &IngestOptions::default().without_header()).unwrap();
        assert_eq!(ok.table.row_count(), 0);
    }

    #[test]
    fn header_only_is_empty_table() {
        let t = read("a,b\n", &IngestOptions::default()).table;
        assert_eq!(t.row_count(), 0);
        assert_eq!(t.column_count(), 2);
    }

    #[test]
    fn invalid_utf8() {
        let bytes = b"a\n\xff\xfe\n";
        let err = read_csv(&bytes[..], "t", &IngestOptions::default()).unwrap_err();
        assert!(matches!(err, IngestError::Encoding { line: 2 }));
        let opts = IngestOptions {
            lossy_utf8: true,
            ..IngestOptions::default()
        };
        assert!(read_csv(&bytes[..], "t", &opts).is_ok());
    }

    #[test]
    fn cell_typing() {
        let o = IngestOptions::default();
        assert_eq!(parse_cell("007", &o), CellValue::text("007"));
        assert_eq!(parse_cell("0.50", &o).precision(), Some(2));
        assert_eq!(parse_cell("-12", &o), CellValue::number(dec!(-12)));
        assert_eq!(parse_cell(" NA ", &o), CellValue::Null);
        assert_eq!(parse_cell("TRUE", &o), CellValue::Boolean(true));
        assert_eq!(parse_cell("1e5", &o), CellValue::text("1e5"));
        assert_eq!(parse_cell(".5", &o), CellValue::text(".5"));
        assert!(matches!(parse_cell("2020-02-29", &o), CellValue::Date(_)));
        assert_eq!(parse_cell("2021-02-29", &o), CellValue::text("2021-02-29"));
        // slash dates need a locale
        assert_eq!(parse_cell("01/02/20", &o), CellValue::text("01/02/20"));
        let dmy = IngestOptions::default().with_locale(super::super::DateLocale::DayFirst);
        assert_eq!(
            parse_cell("01/02/20", &dmy),
            CellValue::Date(DateValue::ymd(2020, 2, 1).unwrap())
        );
        assert_eq!(
            parse_cell("01/02/2020", &dmy),
            CellValue::Date(DateValue::ymd(2020, 2, 1).unwrap())
        );
    }

    #[test]
    fn decimal_comma() {
        let o = IngestOptions {
            delimiter: b';',
            decimal_separator: ',',
            ..IngestOptions::default()
        };
        let t = read("x;y\n1,5;2\n", &o).table;
        assert_eq!(t.cell(0, 0), &CellValue::number(dec!(1.5)));
        let mut out = Vec::new();
        write_csv(&t, &mut out, &o).unwrap();
        assert_eq!(String::from_utf8(out).unwrap(), "x;y\n1,5;2\n");
    }

    #[test]
    fn write_then_read_is_identical() {
        let text =
            "id,name,when,ok,amt\n1,\"Smith, J\",2020-01-02,true,1.50\n2,,2020-01-03T04:05:06,false,-3\n";
        let o = IngestOptions::default();
        let t = read(text, &o).table;
        let mut out = Vec::new();
        write_csv(&t, &mut out, &o).unwrap();
        let again = read_csv(out.as_slice(), "t", &o).unwrap().table;
        assert_eq!(t, again);
        assert_eq!(String::from_utf8(out).unwrap(), text);
    }
}
